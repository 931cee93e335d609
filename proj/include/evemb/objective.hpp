#pragma once

// alpha * L_event + beta * L_intent + gamma * L_sentiment over one example,
// with a single shared forward pass of the event embedding.

#include "evemb/model.hpp"

#include <optional>
#include <string>
#include <vector>

namespace evemb {

struct LossWeights {
	double alpha = 1.0;
	double beta = 1.0;
	double gamma = 1.0;
};

struct TrainingExample {
	IndexedEvent event;
	std::optional<std::vector<WordId>> intent;
	std::optional<Polarity> polarity;
	std::string intent_text; // for detecting textual collisions with negatives
};

struct Negatives {
	IndexedEvent corrupted;
	std::optional<std::vector<WordId>> intent;
};

struct JointLoss {
	double event = 0.0;
	double intent = 0.0;
	double sentiment = 0.0;
	double total = 0.0;
	bool has_event = false;
	bool has_intent = false;
	bool has_sentiment = false;
};

// Terms with zero weight or missing annotations are skipped entirely. Throws
// if no term remains. With grads non-null, adds dL/dtheta into it.
JointLoss joint_loss(const Model &model, const TrainingExample &example, const Negatives &negatives,
                     const LossWeights &weights, double lambda, GradientBuffer *grads = nullptr);

std::vector<TrainingExample> make_training_examples(const Model &model, const std::vector<EventTuple> &corpus,
                                                    const std::vector<AnnotatedExample> &annotations);

// Draws the corrupted event and a wrong intent for an example.
class NegativeSampler {
public:
	NegativeSampler(const std::vector<TrainingExample> &examples, std::size_t vocab_size, CorruptionTarget target);

	Negatives draw(std::size_t example_index, Rng &rng) const;

private:
	const std::vector<TrainingExample> *examples_;
	std::size_t vocab_size_;
	CorruptionTarget target_;
	std::vector<std::size_t> with_intent_;
	std::size_t distinct_intents_ = 0;
};

} // namespace evemb
