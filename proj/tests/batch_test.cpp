#include "test_support.hpp"

#include "evemb/batch.hpp"

#include <doctest.h>

using namespace evemb;
using namespace evemb::testing;

namespace {

struct BatchFixture {
	Model model;
	std::vector<TrainingExample> examples;
	std::vector<BatchItem> batch;

	BatchFixture(std::size_t count, std::uint64_t seed) : model(numbered_vocab(20), {6, 4, 2})
	{
		Rng rng(seed);
		model.initialize(rng);
		for (std::size_t i = 0; i < count; ++i) {
			TrainingExample ex;
			ex.event = random_event(rng, model.vocab.size());
			if (i % 3 != 0)
				ex.intent = random_words(rng, 1 + rng.uniform_index(3), model.vocab.size());
			if (i % 2 == 0)
				ex.polarity = i % 4 ? Polarity::positive : Polarity::negative;
			examples.push_back(ex);
		}
		for (const auto &ex : examples)
			batch.push_back({&ex, {corrupt_event(ex.event, model.vocab.size(), CorruptionTarget::actor, rng),
			                       random_words(rng, 2, model.vocab.size())}});
	}
};

} // namespace

TEST_CASE("parallel batch gradients are bit-identical to the serial reference")
{
	for (std::size_t count : {1, 2, 7, 33}) {
		BatchFixture a(count, 10 + count), b(count, 10 + count);
		const auto ls = serial::batch_gradients(a.model, a.batch, {1, 1, 1}, 1e-4);
		for (std::size_t threads : {1, 2, 3, 8}) {
			const auto lp = omp::batch_gradients(b.model, b.batch, {1, 1, 1}, 1e-4, threads);
			CHECK(lp.total == ls.total);
			CHECK(lp.event == ls.event);
			CHECK(lp.intent == ls.intent);
			CHECK(lp.sentiment == ls.sentiment);
			CHECK(lp.intent_terms == ls.intent_terms);
			CHECK(b.model.store == a.model.store);
		}
	}
}

TEST_CASE("batch gradient is the mean of per-example gradients")
{
	BatchFixture f(5, 3);
	GradientBuffer sum(f.model.store);
	for (const auto &item : f.batch)
		joint_loss(f.model, *item.example, item.negatives, {1, 1, 1}, 1e-4, &sum);
	serial::batch_gradients(f.model, f.batch, {1, 1, 1}, 1e-4);
	for (std::size_t i = 0; i < f.model.store.size(); ++i) {
		const auto total = sum.to_dense(ParamId{i});
		const auto &g = f.model.store[ParamId{i}].grad;
		for (std::size_t j = 0; j < g.size(); ++j)
			CHECK(g.span()[j] == doctest::Approx(total.span()[j] / 5.0).epsilon(1e-12));
	}
}

TEST_CASE("parallel event embedding matches serial")
{
	BatchFixture f(40, 4);
	std::vector<IndexedEvent> events;
	for (const auto &ex : f.examples)
		events.push_back(ex.event);
	const auto s = serial::embed_events(f.model, events);
	const auto p = omp::embed_events(f.model, events);
	REQUIRE(s.size() == 40);
	CHECK(s == p);
	for (std::size_t i = 0; i < events.size(); ++i)
		CHECK(s[i] == f.model.embed(events[i]));
}

TEST_CASE("a failing example in a parallel batch surfaces as an exception")
{
	BatchFixture f(6, 5);
	f.examples[4].intent.reset();
	f.examples[4].polarity.reset();
	// Only intent and sentiment enabled: example 4 has neither.
	CHECK_THROWS_AS(omp::batch_gradients(f.model, f.batch, {0, 1, 1}, 1e-4, 3), Error);
	CHECK_THROWS_AS(serial::batch_gradients(f.model, f.batch, {0, 1, 1}, 1e-4), Error);
}
