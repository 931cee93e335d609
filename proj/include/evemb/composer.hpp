#pragma once

// Low-rank neural tensor composition of (actor, predicate, object) tuples.
//
//   S1 = tanh(A^T T1 P + W1 [A;P] + b1)
//   S2 = tanh(P^T T2 O + W2 [P;O] + b2)
//   C  = tanh(S1^T T3 S2 + W3 [S1;S2] + b3)
//   g(E) = U . C
//
// where each of the k slices of T is left * right + diag(t) with rank n.

#include "evemb/data.hpp"
#include "evemb/params.hpp"
#include "evemb/rng.hpp"

#include <string>
#include <vector>

namespace evemb {

struct CompositionLayer {
	std::size_t d_in = 0;
	std::size_t k = 0;
	std::size_t n = 0;
	ParamId left;   // k x (d_in * n), row i is slice i's d_in x n factor
	ParamId right;  // k x (n * d_in), row i is slice i's n x d_in factor
	ParamId diag;   // k x d_in
	ParamId weight; // k x 2 d_in
	ParamId bias;   // k x 1

	static CompositionLayer create(ParameterStore &store, const std::string &prefix, std::size_t d_in, std::size_t k,
	                               std::size_t n);

	LowRankSliceView slice(const ParameterStore &store, std::size_t i) const;
	LowRankSliceGradView slice_grad(GradientBuffer &grads, std::size_t i) const;
	// Uniform [-1/sqrt(d_in), 1/sqrt(d_in)] for factors, W and b; zero diagonal.
	void initialize(ParameterStore &store, Rng &rng) const;
};

struct ComposeCache {
	Vector input;  // [x; y]
	std::vector<double> left_x;  // k x n
	std::vector<double> right_y; // k x n
	Vector out;
};

Vector compose_pair(const ParameterStore &store, const CompositionLayer &layer, std::span<const double> x,
                    std::span<const double> y, ComposeCache *cache = nullptr);

// Accumulates parameter gradients into grads and input gradients into dx, dy.
void compose_pair_backward(const ParameterStore &store, const CompositionLayer &layer, const ComposeCache &cache,
                           std::span<const double> dout, GradientBuffer &grads, std::span<double> dx,
                           std::span<double> dy);

struct IndexedEvent {
	std::vector<WordId> actor;
	std::vector<WordId> predicate;
	std::vector<WordId> object;

	bool operator==(const IndexedEvent &) const = default;
};

IndexedEvent index_event(const EventTuple &event, const Vocabulary &vocab);

struct EventComposer {
	CompositionLayer actor_predicate;
	CompositionLayer predicate_object;
	CompositionLayer combine;
	ParamId score; // U, k x 1

	static EventComposer create(ParameterStore &store, std::size_t d, std::size_t k, std::size_t n);
	std::size_t width() const noexcept { return combine.k; }
};

struct EventForward {
	Vector actor;
	Vector predicate;
	Vector object;
	ComposeCache s1;
	ComposeCache s2;
	ComposeCache c;

	const Vector &embedding() const noexcept { return c.out; }
};

EventForward embed_event_forward(const ParameterStore &store, const EventComposer &composer, ParamId embedding,
                                 const IndexedEvent &event);
Vector embed_event(const ParameterStore &store, const EventComposer &composer, ParamId embedding,
                   const IndexedEvent &event);
double score_event(const ParameterStore &store, const EventComposer &composer, ParamId embedding,
                   const IndexedEvent &event);
double score_embedding(const ParameterStore &store, const EventComposer &composer, std::span<const double> c);

// Back-propagates dL/dC through the three layers into the word rows.
void embed_event_backward(const ParameterStore &store, const EventComposer &composer, ParamId embedding,
                          const IndexedEvent &event, const EventForward &fwd, std::span<const double> dc,
                          GradientBuffer &grads);

enum class CorruptionTarget { actor, object };

// Replaces every word of the target argument with a uniform draw from the
// non-unknown vocabulary, redrawing any word equal to the one it replaces.
IndexedEvent corrupt_event(const IndexedEvent &event, std::size_t vocab_size, CorruptionTarget target, Rng &rng);
EventTuple corrupt_event(const EventTuple &event, const Vocabulary &vocab, CorruptionTarget target, Rng &rng);

double margin_hinge(double positive_score, double negative_score) noexcept;

// lambda * sum of squares over the composition tensors, W and b.
double l2_penalty(const ParameterStore &store, double lambda);
void l2_penalty_backward(const ParameterStore &store, double lambda, double upstream, GradientBuffer &grads);

struct MarginLossResult {
	double loss = 0.0;
	double hinge = 0.0;
	double penalty = 0.0;
	double positive_score = 0.0;
	double negative_score = 0.0;
};

inline double margin_loss_total(double hinge, double penalty) noexcept
{
	return hinge + penalty;
}

// max(0, 1 - g(E) + g(E^r)) + lambda ||Phi||^2. With grads non-null, adds
// upstream * dL/dtheta; the hinge contributes nothing when inactive.
MarginLossResult event_margin_loss(const ParameterStore &store, const EventComposer &composer, ParamId embedding,
                                   const IndexedEvent &event, const IndexedEvent &corrupted, double lambda,
                                   GradientBuffer *grads = nullptr, double upstream = 1.0);

} // namespace evemb
