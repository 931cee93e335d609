#pragma once

#include "evemb/data.hpp"
#include "evemb/params.hpp"
#include "evemb/rng.hpp"

#include <array>

namespace evemb {

// Binary softmax over event embeddings. Class 0 is negative, class 1 positive.
struct SentimentClassifier {
	std::size_t width = 0;
	ParamId weight; // 2 x k
	ParamId bias;   // 2 x 1

	static SentimentClassifier create(ParameterStore &store, std::size_t k);
	void initialize(ParameterStore &store, Rng &rng) const;
};

constexpr std::size_t polarity_class(Polarity p) noexcept
{
	return p == Polarity::positive ? 1 : 0;
}

std::array<double, 2> sentiment_forward(const ParameterStore &store, const SentimentClassifier &clf,
                                        std::span<const double> event);

// -log p(correct class)
double sentiment_loss(const ParameterStore &store, const SentimentClassifier &clf, std::span<const double> event,
                      Polarity polarity);

// Returns the loss; accumulates upstream * gradients into grads and devent.
double sentiment_loss_backward(const ParameterStore &store, const SentimentClassifier &clf,
                               std::span<const double> event, Polarity polarity, double upstream,
                               GradientBuffer &grads, std::span<double> devent);

} // namespace evemb
