#include "evemb/sentiment.hpp"

#include <algorithm>
#include <cmath>

namespace evemb {

SentimentClassifier SentimentClassifier::create(ParameterStore &store, std::size_t k)
{
	return {k, store.add("sentiment.W", 2, k), store.add("sentiment.b", 2, 1)};
}

void SentimentClassifier::initialize(ParameterStore &store, Rng &rng) const
{
	const double r = 1.0 / std::sqrt(static_cast<double>(width));
	rng.fill_uniform(store[weight].value.span(), -r, r);
	fill_zero(store[bias].value.span());
}

namespace {

std::array<double, 2> logits(const ParameterStore &store, const SentimentClassifier &clf,
                             std::span<const double> event)
{
	require_dim("sentiment input length (k)", clf.width, event.size());
	std::array<double, 2> z{};
	gemv(store[clf.weight].value, event, z);
	const auto b = store[clf.bias].value.span();
	z[0] += b[0];
	z[1] += b[1];
	return z;
}

} // namespace

std::array<double, 2> sentiment_forward(const ParameterStore &store, const SentimentClassifier &clf,
                                        std::span<const double> event)
{
	const auto z = logits(store, clf, event);
	const double m = std::max(z[0], z[1]);
	const double e0 = std::exp(z[0] - m);
	const double e1 = std::exp(z[1] - m);
	const double s = e0 + e1;
	return {e0 / s, e1 / s};
}

double sentiment_loss(const ParameterStore &store, const SentimentClassifier &clf, std::span<const double> event,
                      Polarity polarity)
{
	const auto z = logits(store, clf, event);
	const double m = std::max(z[0], z[1]);
	const double lse = m + std::log(std::exp(z[0] - m) + std::exp(z[1] - m));
	return lse - z[polarity_class(polarity)];
}

double sentiment_loss_backward(const ParameterStore &store, const SentimentClassifier &clf,
                               std::span<const double> event, Polarity polarity, double upstream,
                               GradientBuffer &grads, std::span<double> devent)
{
	const auto p = sentiment_forward(store, clf, event);
	std::array<double, 2> dz = {upstream * p[0], upstream * p[1]};
	dz[polarity_class(polarity)] -= upstream;
	ger_add(1.0, dz, event, grads.dense(clf.weight));
	axpy(1.0, dz, grads.dense(clf.bias).data);
	gemv_t_add(store[clf.weight].value, dz, devent);
	return sentiment_loss(store, clf, event, polarity);
}

} // namespace evemb
