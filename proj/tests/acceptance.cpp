// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include "test_support.hpp"

#include "evemb/checkpoint.hpp"
#include "evemb/evaluation.hpp"
#include "evemb/trainer.hpp"

#include <chrono>
#include <cstdio>
#include <sstream>

using namespace evemb;
using namespace evemb::testing;

namespace {

struct Outcome {
	bool pass = true;
	std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
	return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char *f, auto... args)
{
	char buf[256];
	std::snprintf(buf, sizeof buf, f, args...);
	return buf;
}

// --- 1 ---------------------------------------------------------------------

Outcome gradient_correctness()
{
	const auto t0 = Clock::now();
	const ModelDims dims{6, 4, 2}; // h = 2
	Rng rng(2024);
	double worst = 0.0;
	std::string where;
	auto record = [&](const char *path, const GradCheckResult &r) {
		if (r.max_rel_error > worst || where.empty()) {
			worst = std::max(worst, r.max_rel_error);
			where = std::string(path) + ":" + r.worst_param;
		}
	};

	for (int trial = 0; trial < 3; ++trial) {
		{
			Model m(numbered_vocab(14), dims);
			randomize(m.store, rng);
			IndexedEvent e, r;
			do {
				e = random_event(rng, m.vocab.size());
				r = corrupt_event(e, m.vocab.size(), CorruptionTarget::actor, rng);
			} while (event_margin_loss(m.store, m.composer, m.embedding, e, r, 1e-4).hinge < 0.1);
			ModelOp op(m, [&](const Model &mm, GradientBuffer *g) {
				return event_margin_loss(mm.store, mm.composer, mm.embedding, e, r, 1e-4, g).loss;
			});
			record("event", grad_check(op));
		}
		{
			Model m(numbered_vocab(14), dims);
			std::vector<WordId> pos, neg;
			IndexedEvent e;
			ModelOp op(m, [&](const Model &mm, GradientBuffer *g) {
				const auto ef = embed_event_forward(mm.store, mm.composer, mm.embedding, e);
				const auto pi = encode_intent_forward(mm.store, mm.intent, mm.embedding, pos);
				const auto ni = encode_intent_forward(mm.store, mm.intent, mm.embedding, neg);
				if (!g)
					return intent_loss(ef.embedding(), pi.encoding, ni.encoding).loss;
				Vector de(dims.k), di(dims.k), dn(dims.k);
				const auto res = intent_loss_backward(ef.embedding(), pi.encoding, ni.encoding, 1.0, de, di, dn);
				embed_event_backward(mm.store, mm.composer, mm.embedding, e, ef, de, *g);
				encode_intent_backward(mm.store, mm.intent, mm.embedding, pos, pi, di, *g);
				encode_intent_backward(mm.store, mm.intent, mm.embedding, neg, ni, dn, *g);
				return res.loss;
			});
			do {
				randomize(m.store, rng);
				e = random_event(rng, m.vocab.size());
				pos = random_words(rng, 3, m.vocab.size());
				neg = random_words(rng, 3, m.vocab.size());
			} while (op.forward() < 0.05);
			record("intent", grad_check(op));
		}
		{
			Model m(numbered_vocab(14), dims);
			randomize(m.store, rng, -1, 1);
			const auto e = random_event(rng, m.vocab.size());
			const auto pol = trial % 2 ? Polarity::positive : Polarity::negative;
			ModelOp op(m, [&](const Model &mm, GradientBuffer *g) {
				const auto ef = embed_event_forward(mm.store, mm.composer, mm.embedding, e);
				if (!g)
					return sentiment_loss(mm.store, mm.sentiment, ef.embedding(), pol);
				Vector de(dims.k);
				const double l = sentiment_loss_backward(mm.store, mm.sentiment, ef.embedding(), pol, 1.0, *g, de);
				embed_event_backward(mm.store, mm.composer, mm.embedding, e, ef, de, *g);
				return l;
			});
			record("sentiment", grad_check(op));
		}
		{
			Model m(numbered_vocab(14), dims);
			randomize(m.store, rng);
			TrainingExample ex;
			ex.event = random_event(rng, m.vocab.size());
			ex.intent = random_words(rng, 3, m.vocab.size());
			ex.intent_text = "intent";
			ex.polarity = trial % 2 ? Polarity::negative : Polarity::positive;
			const Negatives neg{corrupt_event(ex.event, m.vocab.size(), CorruptionTarget::actor, rng),
			                    random_words(rng, 3, m.vocab.size())};
			ModelOp op(m, [&](const Model &mm, GradientBuffer *g) {
				return joint_loss(mm, ex, neg, {1.0, 1.0, 1.0}, 1e-4, g).total;
			});
			record("joint", grad_check(op));
		}
	}
	const double secs = seconds_since(t0);
	return {worst < 1e-4 && secs < 30.0,
	        fmt("max rel error %.3g (%s), %.2f s", worst, where.c_str(), secs)};
}

// --- 2 ---------------------------------------------------------------------

Outcome lowrank_dense_equivalence()
{
	Rng rng(77);
	double worst = 0.0;
	for (int trial = 0; trial < 100; ++trial) {
		const std::size_t d = 1 + rng.uniform_index(8);
		const std::size_t k = 1 + rng.uniform_index(6);
		ParameterStore store;
		const auto layer = CompositionLayer::create(store, "l", d, k, d);
		std::vector<Matrix> dense;
		for (std::size_t i = 0; i < k; ++i) {
			dense.push_back(random_matrix(rng, d, d, -1, 1));
			// left = M - diag(r), right = I, diag = r
			auto left = store[layer.left].value.row(i);
			auto right = store[layer.right].value.row(i);
			auto diag = store[layer.diag].value.row(i);
			for (std::size_t r = 0; r < d; ++r) {
				diag[r] = rng.uniform(-1, 1);
				for (std::size_t c = 0; c < d; ++c) {
					left[r * d + c] = dense.back()(r, c) - (r == c ? diag[r] : 0.0);
					right[r * d + c] = r == c ? 1.0 : 0.0;
				}
			}
		}
		rng.fill_uniform(store[layer.weight].value.span(), -1, 1);
		rng.fill_uniform(store[layer.bias].value.span(), -1, 1);
		const auto x = random_vector(rng, d, -1, 1), y = random_vector(rng, d, -1, 1);
		const auto got = compose_pair(store, layer, x, y);
		const auto want = dense_ntn(dense, store[layer.weight].value, store[layer.bias].value.span(), x, y);
		for (std::size_t i = 0; i < k; ++i)
			worst = std::max(worst, std::abs(got[i] - want[i]));
	}
	return {worst <= 1e-12, fmt("100 instances, max abs diff %.3g", worst)};
}

// --- 3 ---------------------------------------------------------------------

Outcome ablation_reduction()
{
	Rng rng(303);
	int mismatches = 0;
	TrainingConfig ntn;
	apply_preset(ntn, "ntn");
	for (int block = 0; block < 10; ++block) {
		Model m(numbered_vocab(20), {6, 4, 2});
		m.initialize(rng);
		for (int t = 0; t < 100; ++t) {
			TrainingExample ex;
			ex.event = random_event(rng, m.vocab.size(), 3);
			ex.intent = random_words(rng, 1 + rng.uniform_index(4), m.vocab.size());
			ex.intent_text = "intent";
			ex.polarity = t % 2 ? Polarity::positive : Polarity::negative;
			const Negatives neg{corrupt_event(ex.event, m.vocab.size(), CorruptionTarget::actor, rng),
			                    random_words(rng, 2, m.vocab.size())};
			GradientBuffer gj(m.store), ge(m.store);
			const auto j = joint_loss(m, ex, neg, ntn.weights(), ntn.lambda_l2, &gj);
			const auto e = event_margin_loss(m.store, m.composer, m.embedding, ex.event, neg.corrupted,
			                                 ntn.lambda_l2, &ge);
			bool same = j.total == e.loss && !j.has_intent && !j.has_sentiment;
			for (std::size_t i = 0; same && i < m.store.size(); ++i)
				same = gj.to_dense(ParamId{i}) == ge.to_dense(ParamId{i});
			mismatches += !same;
		}
	}
	return {mismatches == 0, fmt("1000 examples, %d not bit-identical", mismatches)};
}

// --- 4 ---------------------------------------------------------------------

Outcome desk_overfit()
{
	const auto t0 = Clock::now();
	const auto corpus = load_corpus(data_path("synthetic/corpus.txt"));
	auto annotations = load_annotations(data_path("synthetic/annotations.tsv"));
	apply_lexicon(annotations, load_lexicon(data_path("synthetic/lexicon.tsv")));
	const auto hard = load_hardsim(data_path("synthetic/hardsim.tsv"));
	TrainingConfig base;
	load_config(data_path("../configs/synthetic.conf"), base);

	bool ok = true;
	std::string detail;
	for (std::uint64_t seed : {1, 2, 3}) {
		double acc[2];
		int i = 0;
		for (const char *preset : {"ntn+int+senti", "ntn"}) {
			auto cfg = base;
			cfg.seed = seed;
			apply_preset(cfg, preset);
			acc[i++] = hard_similarity_accuracy(hard, train(cfg, corpus, annotations).model);
		}
		ok = ok && acc[0] >= 0.9 && acc[0] > acc[1];
		detail += fmt("seed %d: joint %.3f vs ntn %.3f; ", static_cast<int>(seed), acc[0], acc[1]);
	}
	const double secs = seconds_since(t0);
	ok = ok && base.epochs <= 200 && base.d == 10 && base.k == 8 && base.n == 2 && secs < 120.0;
	return {ok, detail + fmt("%zu events, %zu epochs, %.1f s", corpus.size(), base.epochs, secs)};
}

// --- 5 ---------------------------------------------------------------------

std::vector<double> brute_ranks(const std::vector<double> &v)
{
	std::vector<double> r(v.size());
	for (std::size_t i = 0; i < v.size(); ++i) {
		double below = 0, equal = 0;
		for (double w : v) {
			below += w < v[i];
			equal += w == v[i];
		}
		r[i] = below + (equal + 1) / 2.0;
	}
	return r;
}

// nullopt when either side has no spread
std::optional<double> brute_spearman(const std::vector<double> &x, const std::vector<double> &y)
{
	const auto rx = brute_ranks(x), ry = brute_ranks(y);
	const double n = static_cast<double>(x.size());
	double mx = 0, my = 0;
	for (std::size_t i = 0; i < x.size(); ++i) {
		mx += rx[i] / n;
		my += ry[i] / n;
	}
	double sxy = 0, sxx = 0, syy = 0;
	for (std::size_t i = 0; i < x.size(); ++i) {
		sxy += (rx[i] - mx) * (ry[i] - my);
		sxx += (rx[i] - mx) * (rx[i] - mx);
		syy += (ry[i] - my) * (ry[i] - my);
	}
	if (sxx == 0 || syy == 0)
		return std::nullopt;
	return sxy / std::sqrt(sxx * syy);
}

double loop_cosine(const Vector &u, const Vector &v)
{
	double uv = 0, uu = 0, vv = 0;
	for (std::size_t i = 0; i < u.size(); ++i) {
		uv += u[i] * v[i];
		uu += u[i] * u[i];
		vv += v[i] * v[i];
	}
	if (uu == 0 || vv == 0)
		return 0.0;
	return uv / (std::sqrt(uu) * std::sqrt(vv) + 1e-8);
}

Outcome metric_oracles()
{
	Rng rng(505);
	double worst = 0.0;
	int failures = 0, undefined = 0;
	for (int t = 0; t < 200; ++t) {
		const std::size_t n = 3 + rng.uniform_index(18);
		const bool ties = t % 2 == 0;
		std::vector<double> x(n), y(n);
		for (std::size_t i = 0; i < n; ++i) {
			x[i] = ties ? static_cast<double>(rng.uniform_index(5)) : rng.uniform(-1, 1);
			y[i] = ties ? 1.0 + static_cast<double>(rng.uniform_index(4)) : rng.uniform(1, 7);
		}
		const auto want = brute_spearman(x, y);
		try {
			const double got = spearman_rho(x, y);
			if (!want)
				++failures;
			else
				worst = std::max(worst, std::abs(got - *want));
		} catch (const UndefinedMetricError &) {
			failures += want.has_value();
			++undefined;
		}
	}

	int hard_mismatch = 0;
	for (int trial = 0; trial < 50; ++trial) {
		Model m(numbered_vocab(6), {4, 4, 2});
		m.initialize(rng);
		auto tuple = [&] {
			auto w = [&] { return WordList{m.vocab.word(static_cast<WordId>(1 + rng.uniform_index(m.vocab.size() - 1)))}; };
			return EventTuple{w(), w(), w()};
		};
		std::vector<HardSimInstance> data;
		for (std::size_t i = 0, n = 1 + rng.uniform_index(8); i < n; ++i)
			data.push_back({{tuple(), tuple()}, {tuple(), tuple()}});
		double correct = 0;
		for (const auto &inst : data)
			correct += loop_cosine(m.embed(inst.similar.first), m.embed(inst.similar.second)) >
			           loop_cosine(m.embed(inst.dissimilar.first), m.embed(inst.dissimilar.second));
		hard_mismatch += hard_similarity_accuracy(data, m) != correct / static_cast<double>(data.size());
	}
	return {failures == 0 && worst <= 1e-12 && hard_mismatch == 0,
	        fmt("spearman: 200 vectors, max diff %.3g, %d undefined, %d wrong; hard-sim: %d/50 mismatched", worst,
	            undefined, failures, hard_mismatch)};
}

// --- 6 ---------------------------------------------------------------------

Outcome adagrad_trace()
{
	ParameterStore store;
	const auto id = store.add("theta", 1, 1);
	auto &p = store[id];
	p.grad(0, 0) = 3.0;
	adagrad_step(store, 1.0);
	p.grad(0, 0) = 4.0;
	adagrad_step(store, 1.0);
	const double expected = (0.0 - 3.0 / (std::sqrt(9.0) + 1e-8)) - 4.0 / (std::sqrt(25.0) + 1e-8);
	const double delta = p.value(0, 0);
	return {delta == expected && std::abs(delta + 1.8) < 1e-8 && p.accum(0, 0) == 25.0,
	        fmt("delta %.17g, accumulator %g", delta, p.accum(0, 0))};
}

// --- 7 ---------------------------------------------------------------------

Outcome determinism_persistence()
{
	const auto corpus = load_corpus(data_path("synthetic/corpus.txt"));
	auto annotations = load_annotations(data_path("synthetic/annotations.tsv"));
	apply_lexicon(annotations, load_lexicon(data_path("synthetic/lexicon.tsv")));
	TrainingConfig cfg;
	load_config(data_path("../configs/synthetic.conf"), cfg);
	cfg.epochs = 5;

	const auto a = serialize_checkpoint(train(cfg, corpus, annotations));
	const auto b = serialize_checkpoint(train(cfg, corpus, annotations));
	const auto s = serialize_checkpoint(train(cfg, corpus, annotations, nullptr, {}, Execution::serial));
	const bool identical = a == b && a == s;

	const auto back = deserialize_checkpoint(a);
	const auto original = deserialize_checkpoint(a);
	const bool roundtrip = serialize_checkpoint(back) == a && back.model.store == original.model.store;

	std::size_t tried = 0, rejected = 0;
	auto expect_reject = [&](const std::string &bytes) {
		++tried;
		try {
			deserialize_checkpoint(bytes);
		} catch (const CheckpointError &) {
			++rejected;
		}
	};
	for (std::size_t pos = 0; pos < a.size(); pos += 1 + a.size() / 200) {
		auto bad = a;
		bad[pos] = static_cast<char>(bad[pos] ^ 0x01);
		expect_reject(bad);
	}
	for (std::size_t len : {std::size_t{0}, std::size_t{7}, a.size() / 2, a.size() - 1})
		expect_reject(a.substr(0, len));
	expect_reject(a + '\0');

	return {identical && roundtrip && tried == rejected,
	        fmt("repeat runs identical: %s, round-trip exact: %s, corrupted rejected %zu/%zu",
	            identical ? "yes" : "no", roundtrip ? "yes" : "no", rejected, tried)};
}

// --- 8 ---------------------------------------------------------------------

Outcome polarity_rule()
{
	const auto bundled = load_lexicon(data_path("synthetic/lexicon.tsv"));
	std::istringstream in("persony|broke|vase\tto vent anger\tsad, be regretful, feel sorry, afraid\n");
	auto ex = parse_annotations(in, "exemplar");
	apply_lexicon(ex, bundled);
	const bool exemplar = ex.size() == 1 && ex[0].polarity == Polarity::negative &&
	                      derive_polarity({"sad", "regretful", "sorry", "afraid"}, bundled) == Polarity::negative;

	Rng rng(808);
	int mismatches = 0;
	for (int t = 0; t < 1000; ++t) {
		// Fresh lexicon each draw; a third of the pool stays unlisted.
		SentimentLexicon lex;
		std::vector<int> sign(24, 0);
		for (std::size_t w = 0; w < sign.size(); ++w) {
			const auto u = rng.uniform_index(3);
			if (u == 0)
				continue;
			sign[w] = u == 1 ? 1 : -1;
			lex.set("w" + std::to_string(w), sign[w] > 0 ? Polarity::positive : Polarity::negative);
		}
		WordList words;
		int pos = 0, neg = 0;
		for (std::size_t i = 0, n = 1 + rng.uniform_index(10); i < n; ++i) {
			const auto w = rng.uniform_index(sign.size());
			words.push_back("w" + std::to_string(w));
			pos += sign[w] > 0;
			neg += sign[w] < 0;
		}
		const auto want = pos > neg ? std::optional(Polarity::positive)
		                            : pos < neg ? std::optional(Polarity::negative) : std::nullopt;
		mismatches += derive_polarity(words, lex) != want;
	}
	return {exemplar && mismatches == 0,
	        fmt("exemplar negative: %s, 1000 draws, %d mismatches", exemplar ? "yes" : "no", mismatches)};
}

} // namespace

int main()
{
	const std::pair<const char *, Outcome (*)()> criteria[] = {
		{"gradient correctness", gradient_correctness},
		{"low-rank/dense equivalence", lowrank_dense_equivalence},
		{"ablation reduction identity", ablation_reduction},
		{"desk-scale overfit", desk_overfit},
		{"metric oracles", metric_oracles},
		{"adagrad hand-trace", adagrad_trace},
		{"determinism and persistence", determinism_persistence},
		{"polarity rule", polarity_rule},
	};
	int failed = 0, index = 0;
	for (const auto &[name, check] : criteria) {
		++index;
		Outcome o;
		try {
			o = check();
		} catch (const std::exception &e) {
			o = {false, std::string("exception: ") + e.what()};
		}
		failed += !o.pass;
		std::printf("%s  %d. %s: %s\n", o.pass ? "PASS" : "FAIL", index, name, o.detail.c_str());
		std::fflush(stdout);
	}
	std::printf("%d/%d criteria passed\n", index - failed, index);
	return failed == 0 ? 0 : 1;
}
