#include "evemb/batch.hpp"

namespace evemb {

void BatchLoss::add(const JointLoss &loss)
{
	++examples;
	total += loss.total;
	if (loss.has_event) {
		event += loss.event;
		++event_terms;
	}
	if (loss.has_intent) {
		intent += loss.intent;
		++intent_terms;
	}
	if (loss.has_sentiment) {
		sentiment += loss.sentiment;
		++sentiment_terms;
	}
}

namespace detail {

void scale_gradients(ParameterStore &store, double scale)
{
	for (auto &p : store.all())
		for (double &g : p.grad.span())
			g *= scale;
}

} // namespace detail

namespace serial {

BatchLoss batch_gradients(Model &model, std::span<const BatchItem> batch, const LossWeights &weights,
                          double lambda)
{
	model.store.zero_grad();
	BatchLoss loss;
	if (batch.empty())
		return loss;
	GradientBuffer scratch(model.store);
	for (const auto &item : batch) {
		scratch.clear();
		loss.add(joint_loss(model, *item.example, item.negatives, weights, lambda, &scratch));
		scratch.add_into(model.store);
	}
	detail::scale_gradients(model.store, 1.0 / static_cast<double>(batch.size()));
	return loss;
}

std::vector<Vector> embed_events(const Model &model, std::span<const IndexedEvent> events)
{
	std::vector<Vector> out;
	out.reserve(events.size());
	for (const auto &e : events)
		out.push_back(model.embed(e));
	return out;
}

} // namespace serial

BatchLoss batch_gradients(Model &model, std::span<const BatchItem> batch, const LossWeights &weights, double lambda,
                          Execution exec)
{
	return exec == Execution::serial ? serial::batch_gradients(model, batch, weights, lambda)
	                                 : omp::batch_gradients(model, batch, weights, lambda);
}

std::vector<Vector> embed_events(const Model &model, std::span<const IndexedEvent> events, Execution exec)
{
	return exec == Execution::serial ? serial::embed_events(model, events) : omp::embed_events(model, events);
}

} // namespace evemb
