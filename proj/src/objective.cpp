#include "evemb/objective.hpp"

#include <set>

namespace evemb {

JointLoss joint_loss(const Model &model, const TrainingExample &example, const Negatives &negatives,
                     const LossWeights &weights, double lambda, GradientBuffer *grads)
{
	JointLoss out;
	out.has_event = weights.alpha > 0.0;
	out.has_intent = weights.beta > 0.0 && example.intent && negatives.intent;
	out.has_sentiment = weights.gamma > 0.0 && example.polarity.has_value();
	if (!out.has_event && !out.has_intent && !out.has_sentiment)
		throw Error("training example has no usable loss term for the configured weights");

	const auto &store = model.store;
	const auto &composer = model.composer;
	const auto pos = embed_event_forward(store, composer, model.embedding, example.event);
	const auto &c = pos.embedding();
	Vector dc(c.size());

	if (out.has_event) {
		const auto neg = embed_event_forward(store, composer, model.embedding, negatives.corrupted);
		const double ps = score_embedding(store, composer, c);
		const double ns = score_embedding(store, composer, neg.embedding());
		const double hinge = margin_hinge(ps, ns);
		out.event = margin_loss_total(hinge, l2_penalty(store, lambda));
		out.total += weights.alpha * out.event;
		if (grads) {
			if (hinge > 0.0) {
				const auto u = store[composer.score].value.span();
				axpy(-weights.alpha, u, dc);
				Vector dneg(c.size());
				axpy(weights.alpha, u, dneg);
				auto du = grads->dense(composer.score).data;
				axpy(-weights.alpha, c, du);
				axpy(weights.alpha, neg.embedding(), du);
				embed_event_backward(store, composer, model.embedding, negatives.corrupted, neg, dneg, *grads);
			}
			l2_penalty_backward(store, lambda, weights.alpha, *grads);
		}
	}

	if (out.has_intent) {
		const auto vi = encode_intent_forward(store, model.intent, model.embedding, *example.intent);
		const auto vn = encode_intent_forward(store, model.intent, model.embedding, *negatives.intent);
		if (grads) {
			Vector dvi(vi.encoding.size()), dvn(vn.encoding.size());
			out.intent = intent_loss_backward(c, vi.encoding, vn.encoding, weights.beta, dc, dvi, dvn).loss;
			encode_intent_backward(store, model.intent, model.embedding, *example.intent, vi, dvi, *grads);
			encode_intent_backward(store, model.intent, model.embedding, *negatives.intent, vn, dvn, *grads);
		} else {
			out.intent = intent_loss(c, vi.encoding, vn.encoding).loss;
		}
		out.total += weights.beta * out.intent;
	}

	if (out.has_sentiment) {
		out.sentiment = grads ? sentiment_loss_backward(store, model.sentiment, c, *example.polarity, weights.gamma,
		                                                *grads, dc)
		                      : sentiment_loss(store, model.sentiment, c, *example.polarity);
		out.total += weights.gamma * out.sentiment;
	}

	if (grads)
		embed_event_backward(store, composer, model.embedding, example.event, pos, dc, *grads);
	return out;
}

namespace {

std::string join_words(const WordList &words)
{
	std::string s;
	for (const auto &w : words) {
		if (!s.empty())
			s += ' ';
		s += w;
	}
	return s;
}

} // namespace

std::vector<TrainingExample> make_training_examples(const Model &model, const std::vector<EventTuple> &corpus,
                                                    const std::vector<AnnotatedExample> &annotations)
{
	std::vector<TrainingExample> out;
	out.reserve(corpus.size() + annotations.size());
	for (const auto &e : corpus)
		out.push_back({model.index(e), std::nullopt, std::nullopt, {}});
	for (const auto &a : annotations) {
		TrainingExample ex{model.index(a.event), std::nullopt, a.polarity, {}};
		if (a.intent) {
			ex.intent = model.vocab.lookup(*a.intent);
			ex.intent_text = join_words(*a.intent);
		}
		out.push_back(std::move(ex));
	}
	return out;
}

NegativeSampler::NegativeSampler(const std::vector<TrainingExample> &examples, std::size_t vocab_size,
                                 CorruptionTarget target)
	: examples_(&examples), vocab_size_(vocab_size), target_(target)
{
	std::set<std::string> distinct;
	for (std::size_t i = 0; i < examples.size(); ++i)
		if (examples[i].intent) {
			with_intent_.push_back(i);
			distinct.insert(examples[i].intent_text);
		}
	distinct_intents_ = distinct.size();
}

Negatives NegativeSampler::draw(std::size_t example_index, Rng &rng) const
{
	const auto &ex = examples_->at(example_index);
	Negatives neg{corrupt_event(ex.event, vocab_size_, target_, rng), std::nullopt};
	// With a single distinct intent text there is nothing to contrast against.
	if (ex.intent && distinct_intents_ >= 2) {
		while (true) {
			const auto &cand = (*examples_)[with_intent_[rng.uniform_index(with_intent_.size())]];
			if (cand.intent_text != ex.intent_text) {
				neg.intent = cand.intent;
				break;
			}
		}
	}
	return neg;
}

} // namespace evemb
