#include "evemb/batch.hpp"

#include <exception>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace evemb {

std::size_t available_threads()
{
#ifdef _OPENMP
	return static_cast<std::size_t>(omp_get_max_threads());
#else
	return 1;
#endif
}

namespace omp {

BatchLoss batch_gradients(Model &model, std::span<const BatchItem> batch, const LossWeights &weights, double lambda,
                          std::size_t threads)
{
	model.store.zero_grad();
	BatchLoss loss;
	if (batch.empty())
		return loss;

	const std::size_t width = std::min(threads == 0 ? available_threads() : threads, batch.size());
	std::vector<GradientBuffer> scratch(width, GradientBuffer(model.store));
	std::vector<JointLoss> losses(width);
	std::vector<std::exception_ptr> errors(width);
	const Model &frozen = model;

	// Blocks of `width` examples: compute in parallel, reduce in example order.
	for (std::size_t start = 0; start < batch.size(); start += width) {
		const std::size_t count = std::min(width, batch.size() - start);
#pragma omp parallel for schedule(static) num_threads(static_cast<int>(count))
		for (std::ptrdiff_t j = 0; j < static_cast<std::ptrdiff_t>(count); ++j) {
			const auto &item = batch[start + static_cast<std::size_t>(j)];
			try {
				scratch[j].clear();
				losses[j] = joint_loss(frozen, *item.example, item.negatives, weights, lambda, &scratch[j]);
			} catch (...) {
				errors[j] = std::current_exception();
			}
		}
		for (std::size_t j = 0; j < count; ++j) {
			if (errors[j])
				std::rethrow_exception(errors[j]);
			loss.add(losses[j]);
			scratch[j].add_into(model.store);
		}
	}
	detail::scale_gradients(model.store, 1.0 / static_cast<double>(batch.size()));
	return loss;
}

std::vector<Vector> embed_events(const Model &model, std::span<const IndexedEvent> events)
{
	std::vector<Vector> out(events.size());
	std::vector<std::exception_ptr> errors(events.size());
#pragma omp parallel for schedule(static)
	for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(events.size()); ++i) {
		try {
			out[i] = model.embed(events[i]);
		} catch (...) {
			errors[i] = std::current_exception();
		}
	}
	for (const auto &e : errors)
		if (e)
			std::rethrow_exception(e);
	return out;
}

} // namespace omp

} // namespace evemb
