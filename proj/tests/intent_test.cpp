#include "test_support.hpp"

#include "evemb/intent.hpp"

#include <doctest.h>

#include <cmath>

using namespace evemb;
using namespace evemb::testing;

namespace {

struct CellFixture {
	ParameterStore store;
	LstmCell cell;

	CellFixture(std::size_t in, std::size_t h) : cell(LstmCell::create(store, "cell", in, h)) {}
	Matrix &w() { return store[cell.weight].value; }
	Matrix &b() { return store[cell.bias].value; }
};

// Embedding table and encoder only.
struct EncoderFixture {
	ParameterStore store;
	ParamId embedding;
	BiLstmEncoder encoder;

	EncoderFixture(std::size_t vocab, std::size_t d, std::size_t h)
	{
		embedding = store.add("embedding", vocab, d, false, true);
		encoder = BiLstmEncoder::create(store, d, h);
	}
	Vector encode(const std::vector<WordId> &w) const { return encode_intent(store, encoder, embedding, w); }
	void copy_cell(const LstmCell &from, const LstmCell &to)
	{
		store[to.weight].value = store[from.weight].value;
		store[to.bias].value = store[from.bias].value;
	}
};

} // namespace

TEST_CASE("lstm_step")
{
	SUBCASE("all zero")
	{
		CellFixture f(2, 3);
		LstmStepCache c;
		lstm_step(f.store, f.cell, Vector(2), Vector(3), Vector(3), c);
		CHECK(c.h == Vector(3));
		CHECK(c.c == Vector(3));
	}
	SUBCASE("saturated gates carry the cell state")
	{
		CellFixture f(2, 3);
		for (std::size_t j = 0; j < 3; ++j) {
			f.b()(j, 0) = -20.0;    // input gate
			f.b()(3 + j, 0) = 20.0; // forget gate
		}
		Rng rng(1);
		LstmStepCache c;
		lstm_step(f.store, f.cell, random_vector(rng, 2), Vector(3), Vector(3, 1.0), c);
		for (std::size_t j = 0; j < 3; ++j)
			CHECK(std::abs(c.c[j] - 1.0) < 1e-6);
	}
	SUBCASE("matches the scalar-loop oracle, h=3, d=2")
	{
		Rng rng(2);
		for (int t = 0; t < 50; ++t) {
			CellFixture f(2, 3);
			randomize(f.store, rng, -1.5, 1.5);
			const auto x = random_vector(rng, 2, -1, 1), h0 = random_vector(rng, 3, -1, 1),
			           c0 = random_vector(rng, 3, -1, 1);
			LstmStepCache c;
			lstm_step(f.store, f.cell, x, h0, c0, c);
			std::vector<double> h_ref, c_ref;
			lstm_step_ref(f.w(), f.b().span(), x, h0, c0, h_ref, c_ref);
			for (std::size_t j = 0; j < 3; ++j) {
				CHECK(std::abs(c.h[j] - h_ref[j]) < 1e-14);
				CHECK(std::abs(c.c[j] - c_ref[j]) < 1e-14);
			}
		}
	}
	SUBCASE("dimension mismatch")
	{
		CellFixture f(2, 3);
		LstmStepCache c;
		CHECK_THROWS_AS(lstm_step(f.store, f.cell, Vector(3), Vector(3), Vector(3), c), DimensionError);
		CHECK_THROWS_AS(lstm_step(f.store, f.cell, Vector(2), Vector(2), Vector(3), c), DimensionError);
	}
}

TEST_CASE("encode_intent")
{
	SUBCASE("zero cells give zero")
	{
		EncoderFixture f(4, 3, 2);
		Rng rng(3);
		rng.fill_uniform(f.store[f.embedding].value.span(), -1, 1);
		CHECK(f.encode({1}) == Vector(4));
	}
	SUBCASE("palindrome with tied cells has equal halves")
	{
		Rng rng(4);
		EncoderFixture f(6, 3, 2);
		randomize(f.store, rng, -1, 1);
		f.copy_cell(f.encoder.forward, f.encoder.backward);
		for (const auto &words : std::vector<std::vector<WordId>>{{1, 2, 1}, {3, 4, 4, 3}, {5}}) {
			const auto v = f.encode(words);
			for (std::size_t j = 0; j < 2; ++j)
				CHECK(v[j] == v[2 + j]);
		}
	}
	SUBCASE("reversing the input swaps the roles of the two cells")
	{
		Rng rng(5);
		EncoderFixture f(6, 3, 2), g(6, 3, 2);
		randomize(f.store, rng, -1, 1);
		g.store[g.embedding].value = f.store[f.embedding].value;
		for (auto [from, to] : {std::pair{&f.encoder.forward, &g.encoder.backward},
		                        std::pair{&f.encoder.backward, &g.encoder.forward}}) {
			g.store[to->weight].value = f.store[from->weight].value;
			g.store[to->bias].value = f.store[from->bias].value;
		}
		const std::vector<WordId> w{1, 4, 2, 5}, rev{5, 2, 4, 1};
		const auto a = f.encode(w), b = g.encode(rev);
		for (std::size_t j = 0; j < 2; ++j) {
			CHECK(b[j] == a[2 + j]);
			CHECK(b[2 + j] == a[j]);
		}
		CHECK(f.encode(rev) != a);
	}
	SUBCASE("prefixes encode differently and repeated calls agree")
	{
		Rng rng(6);
		EncoderFixture f(8, 3, 2);
		randomize(f.store, rng, -1, 1);
		const std::vector<WordId> w{1, 2, 3, 4};
		const auto full = f.encode(w);
		CHECK(f.encode(w) == full);
		for (std::size_t len = 1; len < w.size(); ++len)
			CHECK(f.encode({w.begin(), w.begin() + static_cast<std::ptrdiff_t>(len)}) != full);
	}
	SUBCASE("empty input")
	{
		EncoderFixture f(4, 3, 2);
		CHECK_THROWS_AS(f.encode({}), Error);
	}
}

TEST_CASE("intent_loss")
{
	const Vector ve{1, 0};
	CHECK(intent_loss(ve, Vector{2, 0}, Vector{-1, 0}).loss == 0.0);
	const Vector v{0.3, -0.8};
	CHECK(intent_loss(ve, v, v).loss == 1.0);
	const Vector vi{0.2, std::sqrt(0.96)}, vn{0.5, std::sqrt(0.75)};
	CHECK(std::abs(intent_loss(ve, vi, vn).loss - 1.3) < 1e-7);

	SUBCASE("bounded in [0, 3] and invariant to scaling the event vector")
	{
		Rng rng(7);
		for (int t = 0; t < 500; ++t) {
			const std::size_t k = 2 + 2 * rng.uniform_index(4);
			const auto e = random_vector(rng, k, -1, 1), i = random_vector(rng, k, -1, 1),
			           n = random_vector(rng, k, -1, 1);
			const double l = intent_loss(e, i, n).loss;
			CHECK(l >= 0.0);
			CHECK(l <= 3.0);
			Vector scaled = e;
			const double c = rng.uniform(0.1, 10.0);
			for (auto &x : scaled)
				x *= c;
			// Only the 1e-8 guard in the cosine denominator breaks exact invariance.
			CHECK(std::abs(intent_loss(scaled, i, n).loss - l) < 1e-6);
		}
		CHECK(intent_loss(Vector(3), Vector{1, 2, 3}, Vector{3, 2, 1}).loss == 1.0);
	}
}

TEST_CASE("grad_check: intent loss through the encoder and composer, h=3, d=4, length 3")
{
	Rng rng(8);
	for (int trial = 0; trial < 5; ++trial) {
		Model m(numbered_vocab(12), {4, 6, 2});
		randomize(m.store, rng);
		const auto e = random_event(rng, m.vocab.size());
		const auto intent = random_words(rng, 3, m.vocab.size());
		auto negative = random_words(rng, 3, m.vocab.size());
		ModelOp op(m, [&](const Model &mm, GradientBuffer *g) {
			const auto ef = embed_event_forward(mm.store, mm.composer, mm.embedding, e);
			const auto pi = encode_intent_forward(mm.store, mm.intent, mm.embedding, intent);
			const auto ni = encode_intent_forward(mm.store, mm.intent, mm.embedding, negative);
			if (!g)
				return intent_loss(ef.embedding(), pi.encoding, ni.encoding).loss;
			Vector de(6), di(6), dn(6);
			const auto r = intent_loss_backward(ef.embedding(), pi.encoding, ni.encoding, 1.0, de, di, dn);
			embed_event_backward(mm.store, mm.composer, mm.embedding, e, ef, de, *g);
			encode_intent_backward(mm.store, mm.intent, mm.embedding, intent, pi, di, *g);
			encode_intent_backward(mm.store, mm.intent, mm.embedding, negative, ni, dn, *g);
			return r.loss;
		});
		REQUIRE(op.forward() > 0.05);
		const auto r = grad_check(op);
		CAPTURE(r.worst_param);
		CAPTURE(r.worst_index);
		CHECK(r.max_rel_error < 1e-4);
	}
}

TEST_CASE("grad_check: cosine similarity")
{
	Rng rng(9);
	for (int t = 0; t < 5; ++t) {
		auto u = random_vector(rng, 5, -1, 1), v = random_vector(rng, 5, -1, 1);
		Vector du(5), dv(5);
		LambdaOp op([&] { return cosine_similarity(u, v); },
		            [&] {
			            du = Vector(5);
			            dv = Vector(5);
			            cosine_similarity_backward(u, v, 1.0, du, dv);
		            },
		            [&] {
			            return std::vector<ParamBinding>{{"u", u.span(), du.span()}, {"v", v.span(), dv.span()}};
		            });
		CHECK(grad_check(op).max_rel_error < 1e-4);
	}
}
