#pragma once

// Batch-level kernels. Each has a serial reference and an OpenMP version; the
// OpenMP version computes every example into its own scratch buffer and
// reduces in example order, so both produce bit-identical results.

#include "evemb/objective.hpp"

#include <span>
#include <vector>

namespace evemb {

enum class Execution { serial, parallel };

struct BatchItem {
	const TrainingExample *example = nullptr;
	Negatives negatives;
};

struct BatchLoss {
	double event = 0.0;
	double intent = 0.0;
	double sentiment = 0.0;
	double total = 0.0;
	std::size_t event_terms = 0;
	std::size_t intent_terms = 0;
	std::size_t sentiment_terms = 0;
	std::size_t examples = 0;

	// Sums (not means) in example order.
	void add(const JointLoss &loss);
};

namespace serial {

// Overwrites model.store gradients with the batch mean of the joint-loss
// gradient and returns summed loss terms.
BatchLoss batch_gradients(Model &model, std::span<const BatchItem> batch, const LossWeights &weights,
                          double lambda);
std::vector<Vector> embed_events(const Model &model, std::span<const IndexedEvent> events);

} // namespace serial

namespace omp {

BatchLoss batch_gradients(Model &model, std::span<const BatchItem> batch, const LossWeights &weights,
                          double lambda, std::size_t threads = 0);
std::vector<Vector> embed_events(const Model &model, std::span<const IndexedEvent> events);

} // namespace omp

BatchLoss batch_gradients(Model &model, std::span<const BatchItem> batch, const LossWeights &weights, double lambda,
                          Execution exec);
std::vector<Vector> embed_events(const Model &model, std::span<const IndexedEvent> events, Execution exec);

std::size_t available_threads();

namespace detail {
void scale_gradients(ParameterStore &store, double scale);
}

} // namespace evemb
