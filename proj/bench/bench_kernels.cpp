// Serial reference vs OpenMP batch kernels at the default model size.

#include "evemb/batch.hpp"

#include <benchmark/benchmark.h>

#include <string>

using namespace evemb;

namespace {

struct Workload {
	Model model;
	std::vector<TrainingExample> examples;
	std::vector<BatchItem> batch;
	std::vector<IndexedEvent> events;

	explicit Workload(std::size_t count) : model(make_vocab(2000), {100, 100, 10})
	{
		Rng rng(7);
		model.initialize(rng);
		const auto v = model.vocab.size();
		auto words = [&](std::size_t len) {
			std::vector<WordId> w(len);
			for (auto &id : w)
				id = static_cast<WordId>(1 + rng.uniform_index(v - 1));
			return w;
		};
		for (std::size_t i = 0; i < count; ++i) {
			TrainingExample ex;
			ex.event = {words(1 + rng.uniform_index(2)), words(1), words(1 + rng.uniform_index(3))};
			ex.intent = words(4);
			ex.intent_text = std::to_string(i);
			ex.polarity = i % 2 ? Polarity::positive : Polarity::negative;
			examples.push_back(std::move(ex));
		}
		for (const auto &ex : examples) {
			batch.push_back({&ex, {corrupt_event(ex.event, v, CorruptionTarget::actor, rng), words(4)}});
			events.push_back(ex.event);
		}
	}

	static Vocabulary make_vocab(std::size_t n)
	{
		Vocabulary vocab;
		for (std::size_t i = 1; i <= n; ++i)
			vocab.add("w" + std::to_string(i));
		return vocab;
	}
};

Workload &workload()
{
	static Workload w(128);
	return w;
}

void BM_batch_gradients_serial(benchmark::State &state)
{
	auto &w = workload();
	for (auto _ : state)
		benchmark::DoNotOptimize(serial::batch_gradients(w.model, w.batch, {1, 1, 1}, 1e-4));
	state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(w.batch.size()));
}

void BM_batch_gradients_omp(benchmark::State &state)
{
	auto &w = workload();
	const auto threads = static_cast<std::size_t>(state.range(0));
	for (auto _ : state)
		benchmark::DoNotOptimize(omp::batch_gradients(w.model, w.batch, {1, 1, 1}, 1e-4, threads));
	state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(w.batch.size()));
}

void BM_embed_events_serial(benchmark::State &state)
{
	auto &w = workload();
	for (auto _ : state)
		benchmark::DoNotOptimize(serial::embed_events(w.model, w.events));
	state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(w.events.size()));
}

void BM_embed_events_omp(benchmark::State &state)
{
	auto &w = workload();
	for (auto _ : state)
		benchmark::DoNotOptimize(omp::embed_events(w.model, w.events));
	state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(w.events.size()));
}

} // namespace

BENCHMARK(BM_batch_gradients_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_batch_gradients_omp)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_embed_events_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_embed_events_omp)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
