#pragma once

#include "evemb/batch.hpp"
#include "evemb/model.hpp"
#include "evemb/objective.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace evemb {

struct TrainingConfig {
	double alpha = 1.0;
	double beta = 1.0;
	double gamma = 1.0;
	double learning_rate = 0.001;
	std::size_t batch_size = 128;
	double lambda_l2 = 0.0001;
	std::size_t d = 100;
	std::size_t k = 100;
	std::size_t n = 10;
	std::size_t epochs = 10;
	std::uint64_t seed = 1;
	CorruptionTarget corruption_target = CorruptionTarget::actor;

	LossWeights weights() const { return {alpha, beta, gamma}; }
	ModelDims dims() const { return {d, k, n}; }
	void validate() const;

	bool operator==(const TrainingConfig &) const = default;
};

// ntn, ntn+int, ntn+senti, ntn+int+senti (the leading "ntn" may be omitted).
void apply_preset(TrainingConfig &config, std::string_view preset);

// Sets one field from its textual form; throws on unknown keys or bad values.
void set_config_value(TrainingConfig &config, std::string_view key, std::string_view value);
// `key = value` lines, '#' comments. Values override those already in config.
void parse_config(std::istream &in, const std::string &source, TrainingConfig &config);
void load_config(const std::string &path, TrainingConfig &config);
// Round-trips exactly through parse_config.
std::string format_config(const TrainingConfig &config);

// acc += g^2; theta -= lr * g / (sqrt(acc) + 1e-8); then g = 0. Every
// gradient is checked for finiteness before anything is modified.
void adagrad_step(ParameterStore &store, double learning_rate);

inline constexpr double kAdagradEpsilon = 1e-8;

struct EpochMetrics {
	std::size_t epoch = 0;
	double event = 0.0;     // mean over examples with an event term
	double intent = 0.0;    // mean over examples with an intent term
	double sentiment = 0.0; // mean over examples with a sentiment term
	double total = 0.0;     // mean joint loss over all examples
};

// "epoch\tL_E\tL_I\tL_S\tL_total"
std::string format_metrics(const EpochMetrics &m);

struct Checkpoint;

class Trainer {
public:
	// Builds the vocabulary and model from the data and initializes it from
	// config.seed. Annotations must already carry their polarity.
	Trainer(TrainingConfig config, const std::vector<EventTuple> &corpus,
	        const std::vector<AnnotatedExample> &annotations, const WordVectors *pretrained = nullptr);
	// Resumes from a checkpoint.
	Trainer(const Checkpoint &checkpoint, const std::vector<EventTuple> &corpus,
	        const std::vector<AnnotatedExample> &annotations);

	EpochMetrics run_epoch();

	void set_execution(Execution exec) noexcept { execution_ = exec; }
	const TrainingConfig &config() const noexcept { return config_; }
	const Model &model() const noexcept { return model_; }
	Model &model() noexcept { return model_; }
	std::size_t epoch() const noexcept { return epoch_; }
	const std::vector<TrainingExample> &examples() const noexcept { return examples_; }
	Checkpoint checkpoint() const;

private:
	void prepare(const std::vector<EventTuple> &corpus, const std::vector<AnnotatedExample> &annotations);

	TrainingConfig config_;
	Model model_;
	Rng rng_;
	std::vector<TrainingExample> examples_;
	std::size_t epoch_ = 0;
	Execution execution_ = Execution::parallel;
};

// Runs config.epochs epochs; on_epoch sees each epoch's metrics and the
// trainer state after it.
using EpochCallback = std::function<void(const EpochMetrics &, const Trainer &)>;
Checkpoint train(const TrainingConfig &config, const std::vector<EventTuple> &corpus,
                 const std::vector<AnnotatedExample> &annotations, const WordVectors *pretrained = nullptr,
                 const EpochCallback &on_epoch = {}, Execution exec = Execution::parallel);

} // namespace evemb
