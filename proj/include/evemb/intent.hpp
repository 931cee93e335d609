#pragma once

// Bidirectional LSTM encoder for intent sentences and the cosine ranking loss
// that ties the intent vector to the event embedding.

#include "evemb/params.hpp"
#include "evemb/rng.hpp"
#include "evemb/data.hpp"

#include <string>
#include <vector>

namespace evemb {

// Gate rows are stacked in the order input, forget, output, candidate.
struct LstmCell {
	std::size_t input = 0;
	std::size_t hidden = 0;
	ParamId weight; // 4h x (input + hidden)
	ParamId bias;   // 4h x 1

	static LstmCell create(ParameterStore &store, const std::string &prefix, std::size_t input, std::size_t hidden);
	void initialize(ParameterStore &store, Rng &rng) const;
};

struct LstmStepCache {
	Vector xh;     // [x; h_prev]
	Vector gates;  // activated i, f, o, candidate
	Vector c_prev;
	Vector c;
	Vector tanh_c;
	Vector h;
};

// i = s(Wi[x;h]+bi), f = s(..), o = s(..), g = tanh(..)
// c = f*c_prev + i*g, h = o*tanh(c)
void lstm_step(const ParameterStore &store, const LstmCell &cell, std::span<const double> x,
               std::span<const double> h_prev, std::span<const double> c_prev, LstmStepCache &cache);

// Given dL/dh and dL/dc at this step, accumulates weight gradients and writes
// dx, dh_prev, dc_prev (overwritten, not accumulated).
void lstm_step_backward(const ParameterStore &store, const LstmCell &cell, const LstmStepCache &cache,
                        std::span<const double> dh, std::span<const double> dc, GradientBuffer &grads,
                        std::span<double> dx, std::span<double> dh_prev, std::span<double> dc_prev);

struct BiLstmEncoder {
	LstmCell forward;
	LstmCell backward;

	static BiLstmEncoder create(ParameterStore &store, std::size_t input, std::size_t hidden);
	std::size_t width() const noexcept { return forward.hidden + backward.hidden; }
};

struct IntentForward {
	std::vector<LstmStepCache> forward_steps;  // word 0 .. T-1
	std::vector<LstmStepCache> backward_steps; // word T-1 .. 0
	Vector encoding;
};

// [final forward hidden state; final backward hidden state], zero initial states.
IntentForward encode_intent_forward(const ParameterStore &store, const BiLstmEncoder &encoder, ParamId embedding,
                                    std::span<const WordId> words);
Vector encode_intent(const ParameterStore &store, const BiLstmEncoder &encoder, ParamId embedding,
                     std::span<const WordId> words);
void encode_intent_backward(const ParameterStore &store, const BiLstmEncoder &encoder, ParamId embedding,
                            std::span<const WordId> words, const IntentForward &fwd, std::span<const double> dv,
                            GradientBuffer &grads);

inline constexpr double kCosineEpsilon = 1e-8;

// u.v / (|u| |v| + 1e-8)
double cosine_similarity(std::span<const double> u, std::span<const double> v);
// Accumulates upstream * dcos/du into du and dcos/dv into dv.
void cosine_similarity_backward(std::span<const double> u, std::span<const double> v, double upstream,
                                std::span<double> du, std::span<double> dv);

struct IntentLossResult {
	double loss = 0.0;
	double positive_cosine = 0.0;
	double negative_cosine = 0.0;
};

// max(0, 1 - cos(v_e, v_i) + cos(v_e, v_neg))
IntentLossResult intent_loss(std::span<const double> event, std::span<const double> intent,
                             std::span<const double> negative);
IntentLossResult intent_loss_backward(std::span<const double> event, std::span<const double> intent,
                                      std::span<const double> negative, double upstream, std::span<double> devent,
                                      std::span<double> dintent, std::span<double> dnegative);

} // namespace evemb
