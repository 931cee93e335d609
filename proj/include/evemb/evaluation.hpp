#pragma once

#include "evemb/batch.hpp"
#include "evemb/data.hpp"
#include "evemb/model.hpp"

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace evemb {

class UndefinedMetricError : public Error {
public:
	using Error::Error;
};

// u.v / (|u||v| + 1e-8), and exactly 0 when either vector is all zero.
double cosine(std::span<const double> u, std::span<const double> v);

struct HardSimScore {
	double similar = 0.0;    // cosine of the similar pair
	double dissimilar = 0.0; // cosine of the dissimilar pair
};

// Fraction of instances with similar > dissimilar; ties are failures.
double hard_similarity_accuracy(std::span<const HardSimScore> scores);
std::vector<HardSimScore> hard_similarity_scores(const std::vector<HardSimInstance> &instances, const Model &model,
                                                 Execution exec = Execution::parallel);
double hard_similarity_accuracy(const std::vector<HardSimInstance> &instances, const Model &model,
                                Execution exec = Execution::parallel);

// 1-based ranks, ties share their average rank.
std::vector<double> fractional_ranks(std::span<const double> values);
double pearson(std::span<const double> x, std::span<const double> y);
// Throws UndefinedMetricError when either side has no rank variance.
double spearman_rho(std::span<const double> predicted, std::span<const double> gold);

std::vector<double> transitive_predictions(const std::vector<TransitiveSimInstance> &instances, const Model &model,
                                           Execution exec = Execution::parallel);
double evaluate_transitive(const std::vector<TransitiveSimInstance> &instances, const Model &model,
                           Execution exec = Execution::parallel);

struct MetricReport {
	std::string metric;
	std::string dataset;
	double value = 0.0;
	std::size_t count = 0;
};

// "metric\tdataset\tvalue\tcount"
std::string format_report(const MetricReport &report);

struct Neighbor {
	std::size_t index = 0;
	double score = 0.0;
};

// Top-n candidates by cosine to the query, descending; ties keep input order.
std::vector<Neighbor> nearest_neighbors(std::span<const double> query, std::span<const Vector> candidates,
                                        std::size_t top);

} // namespace evemb
