#include "evemb/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace evemb {

double cosine(std::span<const double> u, std::span<const double> v)
{
	require_dim("cosine operand length", u.size(), v.size());
	const double nu = std::sqrt(squared_norm(u));
	const double nv = std::sqrt(squared_norm(v));
	if (nu == 0.0 || nv == 0.0)
		return 0.0;
	return dot(u, v) / (nu * nv + 1e-8);
}

double hard_similarity_accuracy(std::span<const HardSimScore> scores)
{
	if (scores.empty())
		throw Error("hard similarity evaluation needs at least one instance");
	std::size_t correct = 0;
	for (const auto &s : scores)
		if (s.similar > s.dissimilar)
			++correct;
	return static_cast<double>(correct) / static_cast<double>(scores.size());
}

std::vector<HardSimScore> hard_similarity_scores(const std::vector<HardSimInstance> &instances, const Model &model,
                                                 Execution exec)
{
	std::vector<IndexedEvent> events;
	events.reserve(4 * instances.size());
	for (const auto &inst : instances) {
		events.push_back(model.index(inst.similar.first));
		events.push_back(model.index(inst.similar.second));
		events.push_back(model.index(inst.dissimilar.first));
		events.push_back(model.index(inst.dissimilar.second));
	}
	const auto emb = embed_events(model, events, exec);
	std::vector<HardSimScore> scores(instances.size());
	for (std::size_t i = 0; i < instances.size(); ++i)
		scores[i] = {cosine(emb[4 * i], emb[4 * i + 1]), cosine(emb[4 * i + 2], emb[4 * i + 3])};
	return scores;
}

double hard_similarity_accuracy(const std::vector<HardSimInstance> &instances, const Model &model, Execution exec)
{
	if (instances.empty())
		throw Error("hard similarity evaluation needs at least one instance");
	return hard_similarity_accuracy(hard_similarity_scores(instances, model, exec));
}

std::vector<double> fractional_ranks(std::span<const double> values)
{
	std::vector<std::size_t> order(values.size());
	std::iota(order.begin(), order.end(), std::size_t{0});
	std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
	std::vector<double> ranks(values.size());
	for (std::size_t i = 0; i < order.size();) {
		std::size_t j = i;
		while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]])
			++j;
		// positions i..j (0-based) share the mean of ranks i+1..j+1
		const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
		for (std::size_t t = i; t <= j; ++t)
			ranks[order[t]] = rank;
		i = j + 1;
	}
	return ranks;
}

double pearson(std::span<const double> x, std::span<const double> y)
{
	require_dim("correlation operand length", x.size(), y.size());
	const double n = static_cast<double>(x.size());
	const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
	const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
	double sxy = 0.0, sxx = 0.0, syy = 0.0;
	for (std::size_t i = 0; i < x.size(); ++i) {
		const double dx = x[i] - mx;
		const double dy = y[i] - my;
		sxy += dx * dy;
		sxx += dx * dx;
		syy += dy * dy;
	}
	if (sxx == 0.0 || syy == 0.0)
		throw UndefinedMetricError("correlation undefined: constant input");
	return sxy / std::sqrt(sxx * syy);
}

double spearman_rho(std::span<const double> predicted, std::span<const double> gold)
{
	require_dim("spearman operand length", predicted.size(), gold.size());
	if (predicted.size() < 3)
		throw UndefinedMetricError("spearman correlation needs at least 3 pairs, got " +
		                           std::to_string(predicted.size()));
	const auto rp = fractional_ranks(predicted);
	const auto rg = fractional_ranks(gold);
	try {
		return pearson(rp, rg);
	} catch (const UndefinedMetricError &) {
		throw UndefinedMetricError("spearman correlation undefined: one side has constant values");
	}
}

std::vector<double> transitive_predictions(const std::vector<TransitiveSimInstance> &instances, const Model &model,
                                           Execution exec)
{
	std::vector<IndexedEvent> events;
	events.reserve(2 * instances.size());
	for (const auto &inst : instances) {
		events.push_back(model.index(inst.pair.first));
		events.push_back(model.index(inst.pair.second));
	}
	const auto emb = embed_events(model, events, exec);
	std::vector<double> pred(instances.size());
	for (std::size_t i = 0; i < instances.size(); ++i)
		pred[i] = cosine(emb[2 * i], emb[2 * i + 1]);
	return pred;
}

double evaluate_transitive(const std::vector<TransitiveSimInstance> &instances, const Model &model, Execution exec)
{
	const auto pred = transitive_predictions(instances, model, exec);
	std::vector<double> gold;
	gold.reserve(instances.size());
	for (const auto &inst : instances)
		gold.push_back(inst.gold);
	return spearman_rho(pred, gold);
}

std::string format_report(const MetricReport &report)
{
	char value[64];
	std::snprintf(value, sizeof value, "%.6f", report.value);
	return report.metric + "\t" + report.dataset + "\t" + value + "\t" + std::to_string(report.count);
}

std::vector<Neighbor> nearest_neighbors(std::span<const double> query, std::span<const Vector> candidates,
                                        std::size_t top)
{
	std::vector<Neighbor> all(candidates.size());
	for (std::size_t i = 0; i < candidates.size(); ++i)
		all[i] = {i, cosine(query, candidates[i])};
	std::stable_sort(all.begin(), all.end(), [](const Neighbor &a, const Neighbor &b) { return a.score > b.score; });
	all.resize(std::min(top, all.size()));
	return all;
}

} // namespace evemb
