#pragma once

// Vocabulary, word vectors, and the line-oriented text formats for corpora,
// commonsense annotations, evaluation sets and the sentiment lexicon.

#include "evemb/tensor.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace evemb {

using WordId = std::uint32_t;
using WordList = std::vector<std::string>;

class ParseError : public Error {
public:
	ParseError(const std::string &source, std::size_t line, const std::string &what);
	explicit ParseError(const std::string &what) : Error(what) {}
};

class Vocabulary {
public:
	static constexpr WordId kUnknown = 0;
	static constexpr std::string_view kUnknownToken = "<unk>";

	Vocabulary();

	// Returns the existing id when the word is already present.
	WordId add(std::string_view word);
	// kUnknown for unseen words.
	WordId lookup(std::string_view word) const;
	std::vector<WordId> lookup(const WordList &words) const;
	bool contains(std::string_view word) const;
	const std::string &word(WordId id) const { return words_.at(id); }
	std::size_t size() const noexcept { return words_.size(); }
	const std::vector<std::string> &words() const noexcept { return words_; }

	bool operator==(const Vocabulary &other) const { return words_ == other.words_; }

private:
	std::vector<std::string> words_;
	std::unordered_map<std::string, WordId> index_;
};

struct EmbeddingTable {
	Matrix vectors; // vocabulary size x d
	std::size_t dim() const noexcept { return vectors.cols(); }
};

struct WordVectors {
	Vocabulary vocab;
	EmbeddingTable table;
};

// One "word v1 ... vd" record per line. The unknown row is the mean of all
// loaded rows. Repeated words keep their first vector.
WordVectors load_word_vectors(const std::string &path);
WordVectors parse_word_vectors(std::istream &in, const std::string &source);

Vector average_rows(ConstMatrixView table, std::span<const WordId> ids);
Vector average_argument(const WordList &words, const EmbeddingTable &table, const Vocabulary &vocab);

struct EventTuple {
	WordList actor;
	WordList predicate;
	WordList object;

	bool operator==(const EventTuple &) const = default;
};

enum class Polarity : int { negative = -1, positive = 1 };

struct AnnotatedExample {
	EventTuple event;
	std::optional<WordList> intent;
	std::optional<WordList> emotion_words;
	std::optional<Polarity> polarity; // derived from emotion_words via a lexicon

	bool operator==(const AnnotatedExample &) const = default;
};

struct HardSimInstance {
	std::pair<EventTuple, EventTuple> similar;
	std::pair<EventTuple, EventTuple> dissimilar;
};

struct TransitiveSimInstance {
	std::pair<EventTuple, EventTuple> pair;
	double gold = 0.0; // averaged annotator score in [1, 7]
};

class SentimentLexicon {
public:
	void set(const std::string &word, Polarity p) { entries_[word] = static_cast<int>(p); }
	// +1, -1, or 0 for absent words.
	int polarity(const std::string &word) const;
	std::size_t size() const noexcept { return entries_.size(); }

private:
	std::unordered_map<std::string, int> entries_;
};

// Sign of the summed word polarities; nullopt when the sum is zero.
std::optional<Polarity> derive_polarity(const WordList &emotion_words, const SentimentLexicon &lexicon);

// Lowercases and splits on spaces.
WordList tokenize(std::string_view text);
// "actor words|predicate words|object words"
EventTuple parse_event(std::string_view text);
std::string format_event(const EventTuple &event);
std::string format_annotation(const AnnotatedExample &example);

std::vector<EventTuple> parse_corpus(std::istream &in, const std::string &source);
std::vector<AnnotatedExample> parse_annotations(std::istream &in, const std::string &source);
std::vector<HardSimInstance> parse_hardsim(std::istream &in, const std::string &source);
std::vector<TransitiveSimInstance> parse_transitive(std::istream &in, const std::string &source);
SentimentLexicon parse_lexicon(std::istream &in, const std::string &source);

std::vector<EventTuple> load_corpus(const std::string &path);
std::vector<AnnotatedExample> load_annotations(const std::string &path);
std::vector<HardSimInstance> load_hardsim(const std::string &path);
std::vector<TransitiveSimInstance> load_transitive(const std::string &path);
SentimentLexicon load_lexicon(const std::string &path);

void write_corpus(std::ostream &out, const std::vector<EventTuple> &events);
void write_annotations(std::ostream &out, const std::vector<AnnotatedExample> &examples);

// Fills each example's polarity from its emotion words.
void apply_lexicon(std::vector<AnnotatedExample> &examples, const SentimentLexicon &lexicon);

// Pretrained words first (in file order), then every token of the corpus and
// of the annotated events and intents, in order of first appearance.
Vocabulary build_vocabulary(const std::vector<EventTuple> &corpus, const std::vector<AnnotatedExample> &annotations,
                            const Vocabulary *pretrained = nullptr);

} // namespace evemb
