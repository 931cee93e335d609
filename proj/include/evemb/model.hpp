#pragma once

#include "evemb/composer.hpp"
#include "evemb/data.hpp"
#include "evemb/intent.hpp"
#include "evemb/params.hpp"
#include "evemb/rng.hpp"
#include "evemb/sentiment.hpp"

namespace evemb {

struct ModelDims {
	std::size_t d = 100; // word vector width
	std::size_t k = 100; // slices per layer, event embedding width
	std::size_t n = 10;  // slice rank

	// The intent vector must be as wide as the event embedding.
	std::size_t hidden() const noexcept { return k / 2; }
	void validate() const;

	bool operator==(const ModelDims &) const = default;
};

// Every trainable array lives in `store`; the component structs only hold
// handles into it, so a Model copies by value.
struct Model {
	Vocabulary vocab;
	ModelDims dims;
	ParameterStore store;
	ParamId embedding;
	EventComposer composer;
	BiLstmEncoder intent;
	SentimentClassifier sentiment;

	// Builds the parameter layout with all values zero.
	Model(Vocabulary vocab, ModelDims dims);

	// Word rows come from `pretrained` where available, otherwise uniform in
	// [-0.1, 0.1]; the remaining blocks use their own fan-in ranges.
	void initialize(Rng &rng, const WordVectors *pretrained = nullptr);

	IndexedEvent index(const EventTuple &event) const { return index_event(event, vocab); }
	Vector embed(const EventTuple &event) const;
	Vector embed(const IndexedEvent &event) const;
	double score(const EventTuple &event) const;
	Vector encode_intent(const WordList &words) const;
};

} // namespace evemb
