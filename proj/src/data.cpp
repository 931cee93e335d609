#include "evemb/data.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

namespace evemb {

namespace {

std::ifstream open_input(const std::string &path)
{
	std::ifstream in(path);
	if (!in)
		throw Error("cannot open " + path);
	return in;
}

// Calls fn(line_number, line) for every non-blank, non-comment line.
template<typename Fn>
void for_each_record(std::istream &in, const std::string &source, Fn &&fn)
{
	std::string line;
	std::size_t number = 0;
	while (std::getline(in, line)) {
		++number;
		if (!line.empty() && line.back() == '\r')
			line.pop_back();
		const auto first = line.find_first_not_of(" \t");
		if (first == std::string::npos || line[first] == '#')
			continue;
		try {
			fn(number, std::string_view(line));
		} catch (const ParseError &e) {
			throw ParseError(source, number, e.what());
		} catch (const DimensionError &e) {
			throw ParseError(source, number, e.what());
		}
	}
}

std::vector<std::string_view> split(std::string_view text, char sep)
{
	std::vector<std::string_view> parts;
	std::size_t start = 0;
	while (true) {
		const auto pos = text.find(sep, start);
		if (pos == std::string_view::npos) {
			parts.push_back(text.substr(start));
			return parts;
		}
		parts.push_back(text.substr(start, pos - start));
		start = pos + 1;
	}
}

std::vector<std::string_view> split_fields(std::string_view line, std::size_t expected, const char *record)
{
	auto fields = split(line, '\t');
	if (fields.size() > expected)
		throw ParseError(std::string("unexpected extra field in ") + record + " record (expected " +
		                 std::to_string(expected) + " tab-separated fields, got " + std::to_string(fields.size()) +
		                 ")");
	if (fields.size() < expected)
		throw ParseError(std::string("malformed ") + record + " record (expected " + std::to_string(expected) +
		                 " tab-separated fields, got " + std::to_string(fields.size()) + ")");
	return fields;
}

double parse_real(std::string_view text)
{
	// from_chars for double is available in libstdc++ 11.
	double value = 0.0;
	const auto *begin = text.data();
	const auto *end = text.data() + text.size();
	if (!text.empty() && *begin == '+')
		++begin;
	auto [ptr, ec] = std::from_chars(begin, end, value);
	if (ec != std::errc() || ptr != end || !std::isfinite(value))
		throw ParseError("invalid number '" + std::string(text) + "'");
	return value;
}

std::string join(const WordList &words, std::string_view sep)
{
	std::string out;
	for (std::size_t i = 0; i < words.size(); ++i) {
		if (i)
			out += sep;
		out += words[i];
	}
	return out;
}

} // namespace

ParseError::ParseError(const std::string &source, std::size_t line, const std::string &what)
	: Error(source + ":" + std::to_string(line) + ": " + what)
{
}

Vocabulary::Vocabulary()
{
	add(kUnknownToken);
}

WordId Vocabulary::add(std::string_view word)
{
	auto [it, inserted] = index_.try_emplace(std::string(word), static_cast<WordId>(words_.size()));
	if (inserted)
		words_.emplace_back(word);
	return it->second;
}

WordId Vocabulary::lookup(std::string_view word) const
{
	const auto it = index_.find(std::string(word));
	return it == index_.end() ? kUnknown : it->second;
}

std::vector<WordId> Vocabulary::lookup(const WordList &words) const
{
	std::vector<WordId> ids;
	ids.reserve(words.size());
	for (const auto &w : words)
		ids.push_back(lookup(w));
	return ids;
}

bool Vocabulary::contains(std::string_view word) const
{
	return index_.count(std::string(word)) != 0;
}

WordVectors parse_word_vectors(std::istream &in, const std::string &source)
{
	WordVectors out;
	std::vector<double> rows;
	std::size_t dim = 0;
	for_each_record(in, source, [&](std::size_t, std::string_view line) {
		std::vector<std::string_view> tokens;
		for (auto t : split(line, ' '))
			if (!t.empty())
				tokens.push_back(t);
		if (tokens.size() < 2)
			throw ParseError("word vector record needs a word and at least one value");
		const std::size_t d = tokens.size() - 1;
		if (dim == 0)
			dim = d;
		else if (d != dim)
			throw ParseError("inconsistent vector dimension: expected " + std::to_string(dim) + ", got " +
			                 std::to_string(d));
		const auto word = tokenize(tokens[0]);
		if (word.size() != 1)
			throw ParseError("invalid word token");
		std::vector<double> values;
		values.reserve(d);
		for (std::size_t i = 1; i < tokens.size(); ++i)
			values.push_back(parse_real(tokens[i]));
		if (out.vocab.contains(word[0]))
			return;
		out.vocab.add(word[0]);
		rows.insert(rows.end(), values.begin(), values.end());
	});
	if (dim == 0)
		throw ParseError(source + ": no word vectors found");

	const std::size_t loaded = out.vocab.size() - 1;
	out.table.vectors = Matrix(out.vocab.size(), dim);
	auto unk = out.table.vectors.row(Vocabulary::kUnknown);
	for (std::size_t r = 0; r < loaded; ++r) {
		auto src = std::span<const double>(rows).subspan(r * dim, dim);
		auto dst = out.table.vectors.row(r + 1);
		std::copy(src.begin(), src.end(), dst.begin());
		axpy(1.0, src, unk);
	}
	for (double &v : unk)
		v /= static_cast<double>(loaded);
	return out;
}

WordVectors load_word_vectors(const std::string &path)
{
	auto in = open_input(path);
	return parse_word_vectors(in, path);
}

Vector average_rows(ConstMatrixView table, std::span<const WordId> ids)
{
	if (ids.empty())
		throw Error("cannot average an empty word list");
	Vector mean(table.cols);
	for (WordId id : ids) {
		if (id >= table.rows)
			throw DimensionError("word id " + std::to_string(id) + " outside embedding table of " +
			                     std::to_string(table.rows) + " rows");
		axpy(1.0, table.row(id), mean);
	}
	const double inv = 1.0 / static_cast<double>(ids.size());
	for (double &v : mean)
		v *= inv;
	return mean;
}

Vector average_argument(const WordList &words, const EmbeddingTable &table, const Vocabulary &vocab)
{
	require_dim("embedding table rows (vocabulary size)", vocab.size(), table.vectors.rows());
	const auto ids = vocab.lookup(words);
	return average_rows(table.vectors, ids);
}

int SentimentLexicon::polarity(const std::string &word) const
{
	const auto it = entries_.find(word);
	return it == entries_.end() ? 0 : it->second;
}

std::optional<Polarity> derive_polarity(const WordList &emotion_words, const SentimentLexicon &lexicon)
{
	long sum = 0;
	for (const auto &w : emotion_words)
		sum += lexicon.polarity(w);
	if (sum > 0)
		return Polarity::positive;
	if (sum < 0)
		return Polarity::negative;
	return std::nullopt;
}

WordList tokenize(std::string_view text)
{
	WordList words;
	for (auto t : split(text, ' ')) {
		if (t.empty())
			continue;
		std::string w(t);
		for (char &c : w)
			c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
		words.push_back(std::move(w));
	}
	return words;
}

EventTuple parse_event(std::string_view text)
{
	const auto parts = split(text, '|');
	if (parts.size() != 3)
		throw ParseError("event must have 3 '|'-separated arguments, got " + std::to_string(parts.size()));
	EventTuple e{tokenize(parts[0]), tokenize(parts[1]), tokenize(parts[2])};
	if (e.actor.empty())
		throw ParseError("event actor is empty");
	if (e.predicate.empty())
		throw ParseError("event predicate is empty");
	if (e.object.empty())
		throw ParseError("event object is empty");
	return e;
}

std::string format_event(const EventTuple &event)
{
	return join(event.actor, " ") + "|" + join(event.predicate, " ") + "|" + join(event.object, " ");
}

std::string format_annotation(const AnnotatedExample &example)
{
	std::string line = format_event(example.event) + "\t";
	line += example.intent ? join(*example.intent, " ") : "-";
	line += "\t";
	line += example.emotion_words ? join(*example.emotion_words, ",") : "-";
	return line;
}

std::vector<EventTuple> parse_corpus(std::istream &in, const std::string &source)
{
	std::vector<EventTuple> events;
	for_each_record(in, source, [&](std::size_t, std::string_view line) {
		if (line.find('\t') != std::string_view::npos)
			throw ParseError("unexpected extra field in corpus record");
		events.push_back(parse_event(line));
	});
	return events;
}

std::vector<AnnotatedExample> parse_annotations(std::istream &in, const std::string &source)
{
	std::vector<AnnotatedExample> out;
	for_each_record(in, source, [&](std::size_t, std::string_view line) {
		const auto fields = split_fields(line, 3, "annotation");
		AnnotatedExample ex;
		ex.event = parse_event(fields[0]);
		if (fields[1] != "-") {
			auto words = tokenize(fields[1]);
			if (words.empty())
				throw ParseError("empty intent (use '-' for none)");
			ex.intent = std::move(words);
		}
		if (fields[2] != "-") {
			WordList words;
			for (auto phrase : split(fields[2], ',')) {
				auto toks = tokenize(phrase);
				if (toks.empty())
					throw ParseError("empty emotion phrase");
				words.insert(words.end(), toks.begin(), toks.end());
			}
			ex.emotion_words = std::move(words);
		}
		if (!ex.intent && !ex.emotion_words)
			throw ParseError("annotation carries neither intent nor emotion words");
		out.push_back(std::move(ex));
	});
	return out;
}

std::vector<HardSimInstance> parse_hardsim(std::istream &in, const std::string &source)
{
	std::vector<HardSimInstance> out;
	for_each_record(in, source, [&](std::size_t, std::string_view line) {
		const auto f = split_fields(line, 4, "hard similarity");
		out.push_back({{parse_event(f[0]), parse_event(f[1])}, {parse_event(f[2]), parse_event(f[3])}});
	});
	return out;
}

std::vector<TransitiveSimInstance> parse_transitive(std::istream &in, const std::string &source)
{
	std::vector<TransitiveSimInstance> out;
	for_each_record(in, source, [&](std::size_t, std::string_view line) {
		const auto f = split_fields(line, 3, "transitive similarity");
		TransitiveSimInstance inst{{parse_event(f[0]), parse_event(f[1])}, parse_real(f[2])};
		if (inst.gold < 1.0 || inst.gold > 7.0)
			throw ParseError("gold score " + std::string(f[2]) + " outside [1, 7]");
		out.push_back(std::move(inst));
	});
	return out;
}

SentimentLexicon parse_lexicon(std::istream &in, const std::string &source)
{
	SentimentLexicon lex;
	for_each_record(in, source, [&](std::size_t, std::string_view line) {
		const auto f = split_fields(line, 2, "lexicon");
		const auto word = tokenize(f[0]);
		if (word.size() != 1)
			throw ParseError("lexicon entry must be a single word");
		if (f[1] == "+1" || f[1] == "1")
			lex.set(word[0], Polarity::positive);
		else if (f[1] == "-1")
			lex.set(word[0], Polarity::negative);
		else
			throw ParseError("lexicon polarity must be +1 or -1, got '" + std::string(f[1]) + "'");
	});
	return lex;
}

std::vector<EventTuple> load_corpus(const std::string &path)
{
	auto in = open_input(path);
	return parse_corpus(in, path);
}

std::vector<AnnotatedExample> load_annotations(const std::string &path)
{
	auto in = open_input(path);
	return parse_annotations(in, path);
}

std::vector<HardSimInstance> load_hardsim(const std::string &path)
{
	auto in = open_input(path);
	return parse_hardsim(in, path);
}

std::vector<TransitiveSimInstance> load_transitive(const std::string &path)
{
	auto in = open_input(path);
	return parse_transitive(in, path);
}

SentimentLexicon load_lexicon(const std::string &path)
{
	auto in = open_input(path);
	return parse_lexicon(in, path);
}

void write_corpus(std::ostream &out, const std::vector<EventTuple> &events)
{
	for (const auto &e : events)
		out << format_event(e) << '\n';
}

void write_annotations(std::ostream &out, const std::vector<AnnotatedExample> &examples)
{
	for (const auto &e : examples)
		out << format_annotation(e) << '\n';
}

void apply_lexicon(std::vector<AnnotatedExample> &examples, const SentimentLexicon &lexicon)
{
	for (auto &ex : examples)
		ex.polarity = ex.emotion_words ? derive_polarity(*ex.emotion_words, lexicon) : std::nullopt;
}

Vocabulary build_vocabulary(const std::vector<EventTuple> &corpus, const std::vector<AnnotatedExample> &annotations,
                            const Vocabulary *pretrained)
{
	Vocabulary vocab;
	if (pretrained)
		for (const auto &w : pretrained->words())
			vocab.add(w);
	auto add_all = [&](const WordList &words) {
		for (const auto &w : words)
			vocab.add(w);
	};
	auto add_event = [&](const EventTuple &e) {
		add_all(e.actor);
		add_all(e.predicate);
		add_all(e.object);
	};
	for (const auto &e : corpus)
		add_event(e);
	for (const auto &a : annotations) {
		add_event(a.event);
		if (a.intent)
			add_all(*a.intent);
	}
	return vocab;
}

} // namespace evemb
