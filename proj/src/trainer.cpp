#include "evemb/trainer.hpp"

#include "evemb/checkpoint.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

namespace evemb {

void TrainingConfig::validate() const
{
	auto unit = [](const char *name, double v) {
		if (!(v >= 0.0 && v <= 1.0))
			throw Error(std::string(name) + " must lie in [0, 1], got " + std::to_string(v));
	};
	unit("alpha", alpha);
	unit("beta", beta);
	unit("gamma", gamma);
	if (alpha == 0.0 && beta == 0.0 && gamma == 0.0)
		throw Error("at least one of alpha, beta, gamma must be positive");
	if (!(learning_rate > 0.0) || !std::isfinite(learning_rate))
		throw Error("learning_rate must be positive");
	if (batch_size < 1)
		throw Error("batch_size must be at least 1");
	if (!(lambda_l2 >= 0.0) || !std::isfinite(lambda_l2))
		throw Error("lambda_l2 must be non-negative");
	dims().validate();
}

void apply_preset(TrainingConfig &config, std::string_view preset)
{
	std::string p(preset);
	if (p.rfind("ntn", 0) == 0)
		p = p.substr(3);
	if (p.empty()) {
		config.alpha = 1.0, config.beta = 0.0, config.gamma = 0.0;
	} else if (p == "+int") {
		config.alpha = 1.0, config.beta = 1.0, config.gamma = 0.0;
	} else if (p == "+senti") {
		config.alpha = 1.0, config.beta = 0.0, config.gamma = 1.0;
	} else if (p == "+int+senti") {
		config.alpha = 1.0, config.beta = 1.0, config.gamma = 1.0;
	} else {
		throw Error("unknown preset '" + std::string(preset) + "' (expected ntn, ntn+int, ntn+senti or ntn+int+senti)");
	}
}

namespace {

double to_real(std::string_view key, std::string_view text)
{
	double v = 0.0;
	auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
	if (ec != std::errc() || ptr != text.data() + text.size())
		throw Error("invalid value '" + std::string(text) + "' for " + std::string(key));
	return v;
}

std::uint64_t to_unsigned(std::string_view key, std::string_view text)
{
	std::uint64_t v = 0;
	auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
	if (ec != std::errc() || ptr != text.data() + text.size())
		throw Error("invalid value '" + std::string(text) + "' for " + std::string(key));
	return v;
}

std::string_view trim(std::string_view s)
{
	const auto b = s.find_first_not_of(" \t\r");
	if (b == std::string_view::npos)
		return {};
	const auto e = s.find_last_not_of(" \t\r");
	return s.substr(b, e - b + 1);
}

std::string real_text(double v)
{
	char buf[64];
	std::snprintf(buf, sizeof buf, "%.17g", v);
	return buf;
}

} // namespace

void set_config_value(TrainingConfig &c, std::string_view key, std::string_view value)
{
	if (key == "alpha")
		c.alpha = to_real(key, value);
	else if (key == "beta")
		c.beta = to_real(key, value);
	else if (key == "gamma")
		c.gamma = to_real(key, value);
	else if (key == "learning_rate")
		c.learning_rate = to_real(key, value);
	else if (key == "batch_size")
		c.batch_size = to_unsigned(key, value);
	else if (key == "lambda_l2")
		c.lambda_l2 = to_real(key, value);
	else if (key == "d")
		c.d = to_unsigned(key, value);
	else if (key == "k")
		c.k = to_unsigned(key, value);
	else if (key == "n")
		c.n = to_unsigned(key, value);
	else if (key == "epochs")
		c.epochs = to_unsigned(key, value);
	else if (key == "seed")
		c.seed = to_unsigned(key, value);
	else if (key == "corruption_target") {
		if (value == "actor")
			c.corruption_target = CorruptionTarget::actor;
		else if (value == "object")
			c.corruption_target = CorruptionTarget::object;
		else
			throw Error("corruption_target must be 'actor' or 'object', got '" + std::string(value) + "'");
	} else if (key == "preset")
		apply_preset(c, value);
	else
		throw Error("unknown configuration key '" + std::string(key) + "'");
}

void parse_config(std::istream &in, const std::string &source, TrainingConfig &config)
{
	std::string line;
	std::size_t number = 0;
	while (std::getline(in, line)) {
		++number;
		const auto body = trim(line);
		if (body.empty() || body.front() == '#')
			continue;
		const auto eq = body.find('=');
		if (eq == std::string_view::npos)
			throw ParseError(source, number, "expected 'key = value'");
		try {
			set_config_value(config, trim(body.substr(0, eq)), trim(body.substr(eq + 1)));
		} catch (const ParseError &) {
			throw;
		} catch (const Error &e) {
			throw ParseError(source, number, e.what());
		}
	}
}

void load_config(const std::string &path, TrainingConfig &config)
{
	std::ifstream in(path);
	if (!in)
		throw Error("cannot open " + path);
	parse_config(in, path, config);
}

std::string format_config(const TrainingConfig &c)
{
	std::ostringstream os;
	os << "alpha = " << real_text(c.alpha) << '\n'
	   << "beta = " << real_text(c.beta) << '\n'
	   << "gamma = " << real_text(c.gamma) << '\n'
	   << "learning_rate = " << real_text(c.learning_rate) << '\n'
	   << "batch_size = " << c.batch_size << '\n'
	   << "lambda_l2 = " << real_text(c.lambda_l2) << '\n'
	   << "d = " << c.d << '\n'
	   << "k = " << c.k << '\n'
	   << "n = " << c.n << '\n'
	   << "epochs = " << c.epochs << '\n'
	   << "seed = " << c.seed << '\n'
	   << "corruption_target = " << (c.corruption_target == CorruptionTarget::actor ? "actor" : "object") << '\n';
	return os.str();
}

void adagrad_step(ParameterStore &store, double learning_rate)
{
	for (const auto &p : store.all())
		if (!all_finite(p.grad.span()))
			throw Error("non-finite gradient in parameter '" + p.name + "'");
	for (auto &p : store.all()) {
		auto theta = p.value.span();
		auto grad = p.grad.span();
		auto acc = p.accum.span();
		for (std::size_t i = 0; i < theta.size(); ++i) {
			const double g = grad[i];
			if (g == 0.0)
				continue;
			acc[i] += g * g;
			theta[i] -= learning_rate * g / (std::sqrt(acc[i]) + kAdagradEpsilon);
			grad[i] = 0.0;
		}
	}
}

std::string format_metrics(const EpochMetrics &m)
{
	char buf[256];
	std::snprintf(buf, sizeof buf, "%zu\t%.6f\t%.6f\t%.6f\t%.6f", m.epoch, m.event, m.intent, m.sentiment, m.total);
	return buf;
}

namespace {

Model build_model(const TrainingConfig &config, const std::vector<EventTuple> &corpus,
                  const std::vector<AnnotatedExample> &annotations, const WordVectors *pretrained)
{
	config.validate();
	return Model(build_vocabulary(corpus, annotations, pretrained ? &pretrained->vocab : nullptr), config.dims());
}

} // namespace

Trainer::Trainer(TrainingConfig config, const std::vector<EventTuple> &corpus,
                 const std::vector<AnnotatedExample> &annotations, const WordVectors *pretrained)
	: config_(std::move(config)), model_(build_model(config_, corpus, annotations, pretrained)), rng_(config_.seed)
{
	model_.initialize(rng_, pretrained);
	prepare(corpus, annotations);
}

Trainer::Trainer(const Checkpoint &ckpt, const std::vector<EventTuple> &corpus,
                 const std::vector<AnnotatedExample> &annotations)
	: config_(ckpt.config), model_(ckpt.model), epoch_(ckpt.epoch)
{
	config_.validate();
	rng_.set_state(ckpt.rng_state);
	prepare(corpus, annotations);
}

void Trainer::prepare(const std::vector<EventTuple> &corpus, const std::vector<AnnotatedExample> &annotations)
{
	examples_ = make_training_examples(model_, corpus, annotations);
	if (examples_.empty())
		throw Error("training corpus is empty");
}

EpochMetrics Trainer::run_epoch()
{
	std::vector<std::size_t> order(examples_.size());
	std::iota(order.begin(), order.end(), std::size_t{0});
	rng_.shuffle(std::span<std::size_t>(order));

	const NegativeSampler sampler(examples_, model_.vocab.size(), config_.corruption_target);
	const auto weights = config_.weights();
	const std::size_t batch = std::min(config_.batch_size, order.size());

	BatchLoss epoch_loss;
	std::vector<BatchItem> items;
	for (std::size_t start = 0; start < order.size(); start += batch) {
		const std::size_t end = std::min(order.size(), start + batch);
		items.clear();
		for (std::size_t i = start; i < end; ++i)
			items.push_back({&examples_[order[i]], sampler.draw(order[i], rng_)});
		const auto loss = batch_gradients(model_, items, weights, config_.lambda_l2, execution_);
		adagrad_step(model_.store, config_.learning_rate);

		epoch_loss.event += loss.event;
		epoch_loss.intent += loss.intent;
		epoch_loss.sentiment += loss.sentiment;
		epoch_loss.total += loss.total;
		epoch_loss.event_terms += loss.event_terms;
		epoch_loss.intent_terms += loss.intent_terms;
		epoch_loss.sentiment_terms += loss.sentiment_terms;
		epoch_loss.examples += loss.examples;
	}
	++epoch_;

	auto mean = [](double sum, std::size_t n) { return n ? sum / static_cast<double>(n) : 0.0; };
	return {epoch_, mean(epoch_loss.event, epoch_loss.event_terms), mean(epoch_loss.intent, epoch_loss.intent_terms),
	        mean(epoch_loss.sentiment, epoch_loss.sentiment_terms), mean(epoch_loss.total, epoch_loss.examples)};
}

Checkpoint Trainer::checkpoint() const
{
	return {config_, model_, rng_.state(), epoch_};
}

Checkpoint train(const TrainingConfig &config, const std::vector<EventTuple> &corpus,
                 const std::vector<AnnotatedExample> &annotations, const WordVectors *pretrained,
                 const EpochCallback &on_epoch, Execution exec)
{
	Trainer trainer(config, corpus, annotations, pretrained);
	trainer.set_execution(exec);
	for (std::size_t e = 0; e < config.epochs; ++e) {
		const auto metrics = trainer.run_epoch();
		if (on_epoch)
			on_epoch(metrics, trainer);
	}
	return trainer.checkpoint();
}

} // namespace evemb
