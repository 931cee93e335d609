#include "cli.hpp"

#include "evemb/checkpoint.hpp"
#include "evemb/data.hpp"
#include "evemb/evaluation.hpp"
#include "evemb/trainer.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>

namespace evemb::cli {

namespace {

struct TrainArgs {
	std::string config;
	std::string corpus;
	std::string annotations;
	std::string vectors;
	std::string lexicon;
	std::string out;
	std::string preset;
	std::optional<std::size_t> epochs;
	std::optional<std::uint64_t> seed;
	std::optional<double> learning_rate;
	std::optional<std::size_t> batch_size;
	std::optional<double> lambda_l2;
	std::optional<double> alpha, beta, gamma;
	std::optional<std::size_t> d, k, n;
	std::string corruption_target;
	bool serial = false;
};

struct EvalArgs {
	std::string checkpoint;
	std::string data;
};

struct EmbedArgs {
	std::string checkpoint;
	std::string events;
};

struct NnArgs {
	std::string checkpoint;
	std::string query;
	std::string corpus;
	std::size_t top = 10;
};

std::string epoch_file(std::size_t epoch)
{
	char buf[32];
	std::snprintf(buf, sizeof buf, "epoch-%04zu.ckpt", epoch);
	return buf;
}

int run_train(const TrainArgs &a, std::ostream &out, std::ostream &err)
{
	TrainingConfig config;
	if (!a.config.empty())
		load_config(a.config, config);
	if (!a.preset.empty())
		apply_preset(config, a.preset);
	auto set = [](auto &field, const auto &opt) {
		if (opt)
			field = *opt;
	};
	set(config.epochs, a.epochs);
	set(config.seed, a.seed);
	set(config.learning_rate, a.learning_rate);
	set(config.batch_size, a.batch_size);
	set(config.lambda_l2, a.lambda_l2);
	set(config.alpha, a.alpha);
	set(config.beta, a.beta);
	set(config.gamma, a.gamma);
	set(config.d, a.d);
	set(config.k, a.k);
	set(config.n, a.n);
	if (!a.corruption_target.empty())
		set_config_value(config, "corruption_target", a.corruption_target);

	const auto corpus = load_corpus(a.corpus);
	auto annotations = a.annotations.empty() ? std::vector<AnnotatedExample>{} : load_annotations(a.annotations);
	if (!a.lexicon.empty())
		apply_lexicon(annotations, load_lexicon(a.lexicon));
	std::optional<WordVectors> vectors;
	if (!a.vectors.empty()) {
		vectors = load_word_vectors(a.vectors);
		if (vectors->table.dim() != config.d) {
			err << "note: using d = " << vectors->table.dim() << " from " << a.vectors << '\n';
			config.d = vectors->table.dim();
		}
	}
	config.validate();

	// Everything is parsed and validated; only now touch the output directory.
	Trainer trainer(config, corpus, annotations, vectors ? &*vectors : nullptr);
	trainer.set_execution(a.serial ? Execution::serial : Execution::parallel);
	const std::filesystem::path dir(a.out);
	std::filesystem::create_directories(dir);
	std::ofstream metrics(dir / "metrics.tsv", std::ios::trunc);
	if (!metrics)
		throw Error("cannot write " + (dir / "metrics.tsv").string());

	for (std::size_t e = 0; e < config.epochs; ++e) {
		const auto m = trainer.run_epoch();
		metrics << format_metrics(m) << '\n' << std::flush;
		save_checkpoint((dir / epoch_file(m.epoch)).string(), trainer.checkpoint());
		err << format_metrics(m) << '\n';
	}
	save_checkpoint((dir / "model.ckpt").string(), trainer.checkpoint());
	out << "trained " << config.epochs << " epochs on " << trainer.examples().size() << " examples; vocabulary "
	    << trainer.model().vocab.size() << "; checkpoint " << (dir / "model.ckpt").string() << '\n';
	return kExitOk;
}

int run_eval_hard(const EvalArgs &a, std::ostream &out)
{
	const auto ckpt = load_checkpoint(a.checkpoint);
	const auto data = load_hardsim(a.data);
	const double acc = hard_similarity_accuracy(data, ckpt.model);
	out << format_report({"hard_similarity_accuracy", a.data, acc, data.size()}) << '\n';
	return kExitOk;
}

int run_eval_transitive(const EvalArgs &a, std::ostream &out)
{
	const auto ckpt = load_checkpoint(a.checkpoint);
	const auto data = load_transitive(a.data);
	const double rho = evaluate_transitive(data, ckpt.model);
	out << format_report({"transitive_spearman_rho", a.data, rho, data.size()}) << '\n';
	return kExitOk;
}

void print_row(std::ostream &out, const Vector &v)
{
	char buf[40];
	for (std::size_t i = 0; i < v.size(); ++i) {
		std::snprintf(buf, sizeof buf, "%.9g", v[i]);
		out << (i ? " " : "") << buf;
	}
	out << '\n';
}

int run_embed(const EmbedArgs &a, std::ostream &out)
{
	const auto ckpt = load_checkpoint(a.checkpoint);
	const auto events = load_corpus(a.events);
	std::vector<IndexedEvent> indexed;
	for (const auto &e : events)
		indexed.push_back(ckpt.model.index(e));
	for (const auto &v : embed_events(ckpt.model, indexed, Execution::parallel))
		print_row(out, v);
	return kExitOk;
}

int run_nn(const NnArgs &a, std::ostream &out)
{
	const auto ckpt = load_checkpoint(a.checkpoint);
	EventTuple query;
	try {
		query = parse_event(a.query);
	} catch (const ParseError &e) {
		throw Error("invalid --query: " + std::string(e.what()));
	}
	const auto events = load_corpus(a.corpus);
	std::vector<IndexedEvent> indexed;
	for (const auto &e : events)
		indexed.push_back(ckpt.model.index(e));
	const auto emb = embed_events(ckpt.model, indexed, Execution::parallel);
	const auto q = ckpt.model.embed(query);
	char buf[32];
	for (const auto &nb : nearest_neighbors(q, emb, a.top)) {
		std::snprintf(buf, sizeof buf, "%.6f", nb.score);
		out << buf << '\t' << format_event(events[nb.index]) << '\n';
	}
	return kExitOk;
}

} // namespace

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err)
{
	CLI::App app{"Train and evaluate commonsense-enhanced event embeddings"};
	app.name("evemb");
	app.require_subcommand(1);

	TrainArgs train;
	auto *tr = app.add_subcommand("train", "Train a model and write per-epoch checkpoints");
	tr->add_option("--config", train.config, "key = value configuration file")->check(CLI::ExistingFile);
	tr->add_option("--corpus", train.corpus, "event corpus (actor|predicate|object per line)")->required();
	tr->add_option("--annotations", train.annotations, "intent / emotion annotations");
	tr->add_option("--vectors", train.vectors, "pretrained word vectors");
	tr->add_option("--lexicon", train.lexicon, "sentiment lexicon (word<TAB>+1|-1)");
	tr->add_option("--out", train.out, "output directory")->required();
	tr->add_option("--preset", train.preset, "ntn | ntn+int | ntn+senti | ntn+int+senti");
	tr->add_option("--epochs", train.epochs);
	tr->add_option("--seed", train.seed);
	tr->add_option("--learning-rate", train.learning_rate);
	tr->add_option("--batch-size", train.batch_size);
	tr->add_option("--lambda", train.lambda_l2, "L2 weight");
	tr->add_option("--alpha", train.alpha);
	tr->add_option("--beta", train.beta);
	tr->add_option("--gamma", train.gamma);
	tr->add_option("--d", train.d, "word vector width");
	tr->add_option("--k", train.k, "embedding width / slice count");
	tr->add_option("--n", train.n, "slice rank");
	tr->add_option("--corruption-target", train.corruption_target, "actor | object");
	tr->add_flag("--serial", train.serial, "disable the OpenMP batch kernels");

	EvalArgs hard;
	auto *eh = app.add_subcommand("eval-hard", "Hard similarity accuracy");
	eh->add_option("--checkpoint", hard.checkpoint)->required();
	eh->add_option("--data", hard.data)->required();

	EvalArgs trans;
	auto *et = app.add_subcommand("eval-transitive", "Transitive sentence similarity (Spearman)");
	et->add_option("--checkpoint", trans.checkpoint)->required();
	et->add_option("--data", trans.data)->required();

	EmbedArgs embed;
	auto *em = app.add_subcommand("embed", "Print one embedding row per event");
	em->add_option("--checkpoint", embed.checkpoint)->required();
	em->add_option("--events", embed.events)->required();

	NnArgs nn;
	auto *nc = app.add_subcommand("nn", "Nearest events by cosine similarity");
	nc->add_option("--checkpoint", nn.checkpoint)->required();
	nc->add_option("--query", nn.query, "actor|predicate|object")->required();
	nc->add_option("--corpus", nn.corpus)->required();
	nc->add_option("--top", nn.top)->check(CLI::PositiveNumber);

	std::vector<const char *> argv{"evemb"};
	for (const auto &a : args)
		argv.push_back(a.c_str());
	try {
		app.parse(static_cast<int>(argv.size()), argv.data());
	} catch (const CLI::ParseError &e) {
		return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
	}

	try {
		if (tr->parsed())
			return run_train(train, out, err);
		if (eh->parsed())
			return run_eval_hard(hard, out);
		if (et->parsed())
			return run_eval_transitive(trans, out);
		if (em->parsed())
			return run_embed(embed, out);
		if (nc->parsed())
			return run_nn(nn, out);
	} catch (const std::exception &e) {
		err << "error: " << e.what() << '\n';
		return kExitFailure;
	}
	return kExitUsage;
}

} // namespace evemb::cli
