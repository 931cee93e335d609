#include "evemb/model.hpp"

#include <cmath>

namespace evemb {

void ModelDims::validate() const
{
	if (d == 0)
		throw DimensionError("word vector width d must be positive");
	if (k == 0 || k % 2 != 0)
		throw DimensionError("embedding width k must be a positive even number, got " + std::to_string(k));
	if (n == 0 || n > d || n > k)
		throw DimensionError("slice rank n must satisfy 1 <= n <= min(d, k), got " + std::to_string(n));
}

Model::Model(Vocabulary v, ModelDims dims_) : vocab(std::move(v)), dims(dims_)
{
	dims.validate();
	embedding = store.add("embedding", vocab.size(), dims.d, false, true);
	composer = EventComposer::create(store, dims.d, dims.k, dims.n);
	intent = BiLstmEncoder::create(store, dims.d, dims.hidden());
	sentiment = SentimentClassifier::create(store, dims.k);
}

void Model::initialize(Rng &rng, const WordVectors *pretrained)
{
	auto &table = store[embedding].value;
	if (pretrained)
		require_dim("pretrained vector width (d)", dims.d, pretrained->table.dim());
	for (std::size_t r = 0; r < vocab.size(); ++r) {
		auto row = table.row(r);
		const bool known = pretrained && (r == Vocabulary::kUnknown || pretrained->vocab.contains(vocab.word(r)));
		if (known) {
			const auto src = pretrained->table.vectors.row(
				r == Vocabulary::kUnknown ? Vocabulary::kUnknown : pretrained->vocab.lookup(vocab.word(r)));
			std::copy(src.begin(), src.end(), row.begin());
		} else {
			rng.fill_uniform(row, -0.1, 0.1);
		}
	}
	composer.actor_predicate.initialize(store, rng);
	composer.predicate_object.initialize(store, rng);
	composer.combine.initialize(store, rng);
	const double ru = 1.0 / std::sqrt(static_cast<double>(dims.k));
	rng.fill_uniform(store[composer.score].value.span(), -ru, ru);
	intent.forward.initialize(store, rng);
	intent.backward.initialize(store, rng);
	sentiment.initialize(store, rng);
}

Vector Model::embed(const EventTuple &event) const
{
	return embed(index(event));
}

Vector Model::embed(const IndexedEvent &event) const
{
	return embed_event(store, composer, embedding, event);
}

double Model::score(const EventTuple &event) const
{
	return score_event(store, composer, embedding, index(event));
}

Vector Model::encode_intent(const WordList &words) const
{
	const auto ids = vocab.lookup(words);
	return evemb::encode_intent(store, intent, embedding, ids);
}

} // namespace evemb
