#include "evemb/checkpoint.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

namespace evemb {

namespace {

std::uint64_t fnv1a(std::string_view bytes)
{
	std::uint64_t h = 14695981039346656037ull;
	for (unsigned char c : bytes) {
		h ^= c;
		h *= 1099511628211ull;
	}
	return h;
}

class Writer {
public:
	void u32(std::uint32_t v) { le(v, 4); }
	void u64(std::uint64_t v) { le(v, 8); }
	void f64(double v) { le(std::bit_cast<std::uint64_t>(v), 8); }
	void bytes(std::string_view s) { out_.append(s); }
	void string64(std::string_view s)
	{
		u64(s.size());
		bytes(s);
	}
	void string32(std::string_view s)
	{
		u32(static_cast<std::uint32_t>(s.size()));
		bytes(s);
	}
	std::string &str() { return out_; }

private:
	void le(std::uint64_t v, int n)
	{
		for (int i = 0; i < n; ++i)
			out_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
	}
	std::string out_;
};

class Reader {
public:
	Reader(std::string_view data, std::string source) : data_(data), source_(std::move(source)) {}

	std::uint32_t u32() { return static_cast<std::uint32_t>(le(4)); }
	std::uint64_t u64() { return le(8); }
	double f64() { return std::bit_cast<double>(le(8)); }
	std::string_view bytes(std::uint64_t n, const char *what)
	{
		need(n, what);
		auto s = data_.substr(pos_, n);
		pos_ += n;
		return s;
	}
	std::string string64(const char *what) { return std::string(bytes(u64(), what)); }
	std::string string32(const char *what) { return std::string(bytes(u32(), what)); }
	std::size_t position() const noexcept { return pos_; }
	std::size_t remaining() const noexcept { return data_.size() - pos_; }
	[[noreturn]] void fail(const std::string &what) const { throw CheckpointError(source_ + ": " + what); }

private:
	void need(std::uint64_t n, const char *what) const
	{
		if (n > remaining())
			fail(std::string("truncated checkpoint while reading ") + what);
	}
	std::uint64_t le(int n)
	{
		need(static_cast<std::uint64_t>(n), "an integer field");
		std::uint64_t v = 0;
		for (int i = 0; i < n; ++i)
			v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
		pos_ += static_cast<std::size_t>(n);
		return v;
	}

	std::string_view data_;
	std::string source_;
	std::size_t pos_ = 0;
};

std::string shape_text(std::uint64_t rows, std::uint64_t cols)
{
	return std::to_string(rows) + "x" + std::to_string(cols);
}

} // namespace

std::string serialize_checkpoint(const Checkpoint &ckpt)
{
	Writer w;
	w.bytes(std::string_view(kCheckpointMagic, sizeof kCheckpointMagic));
	w.u32(kCheckpointVersion);
	w.u64(ckpt.epoch);
	w.string64(format_config(ckpt.config));
	w.string64(ckpt.rng_state);

	const auto &words = ckpt.model.vocab.words();
	w.u64(words.size());
	for (const auto &word : words)
		w.string32(word);

	const auto params = ckpt.model.store.all();
	w.u64(params.size());
	for (const auto &p : params) {
		w.string32(p.name);
		w.u32(2);
		w.u64(p.value.rows());
		w.u64(p.value.cols());
		for (double v : p.value.span())
			w.f64(v);
		for (double v : p.accum.span())
			w.f64(v);
	}
	w.u64(fnv1a(w.str()));
	return std::move(w.str());
}

Checkpoint deserialize_checkpoint(const std::string &bytes, const std::string &source)
{
	Reader r(bytes, source);
	if (r.bytes(sizeof kCheckpointMagic, "magic") != std::string_view(kCheckpointMagic, sizeof kCheckpointMagic))
		r.fail("not a checkpoint file (bad magic)");
	const auto version = r.u32();
	if (version != kCheckpointVersion)
		r.fail("unsupported checkpoint version " + std::to_string(version) + " (expected " +
		       std::to_string(kCheckpointVersion) + ")");
	if (bytes.size() < sizeof kCheckpointMagic + 4 + 8)
		r.fail("truncated checkpoint");
	{
		const std::string_view body(bytes.data(), bytes.size() - 8);
		Reader tail(std::string_view(bytes).substr(bytes.size() - 8), source);
		if (tail.u64() != fnv1a(body))
			r.fail("checksum mismatch (file truncated or corrupted)");
	}

	const auto epoch = r.u64();
	TrainingConfig config;
	{
		std::istringstream cfg(r.string64("config"));
		try {
			parse_config(cfg, source + " (config)", config);
			config.validate();
		} catch (const Error &e) {
			r.fail(std::string("invalid stored config: ") + e.what());
		}
	}
	auto rng_state = r.string64("rng state");

	Vocabulary vocab;
	const auto count = r.u64();
	if (count == 0 || count > r.remaining())
		r.fail("invalid vocabulary size");
	for (std::uint64_t i = 0; i < count; ++i) {
		auto word = r.string32("vocabulary");
		if (i == 0) {
			if (word != Vocabulary::kUnknownToken)
				r.fail("vocabulary does not start with the unknown token");
			continue;
		}
		if (vocab.add(word) != i)
			r.fail("duplicate vocabulary word '" + word + "'");
	}

	Checkpoint ckpt{config, Model(std::move(vocab), config.dims()), std::move(rng_state), epoch};
	auto &store = ckpt.model.store;
	const auto arrays = r.u64();
	if (arrays != store.size())
		r.fail("checkpoint has " + std::to_string(arrays) + " arrays, config implies " + std::to_string(store.size()));
	for (auto &p : store.all()) {
		const auto name = r.string32("array name");
		if (name != p.name)
			r.fail("unexpected array '" + name + "' where '" + p.name + "' was expected");
		if (r.u32() != 2)
			r.fail("array '" + name + "' is not two-dimensional");
		const auto rows = r.u64();
		const auto cols = r.u64();
		if (rows != p.value.rows() || cols != p.value.cols())
			r.fail("shape mismatch for array '" + name + "': header says " + shape_text(rows, cols) +
			       ", config implies " + shape_text(p.value.rows(), p.value.cols()));
		for (double &v : p.value.span())
			v = r.f64();
		for (double &v : p.accum.span())
			v = r.f64();
	}
	if (r.remaining() != 8)
		r.fail("trailing bytes after the last array");
	return ckpt;
}

void save_checkpoint(const std::string &path, const Checkpoint &ckpt)
{
	const auto bytes = serialize_checkpoint(ckpt);
	const std::string tmp = path + ".tmp";
	{
		std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
		if (!out)
			throw Error("cannot write " + tmp);
		out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
		if (!out)
			throw Error("failed writing " + tmp);
	}
	std::error_code ec;
	std::filesystem::rename(tmp, path, ec);
	if (ec) {
		std::filesystem::remove(tmp);
		throw Error("cannot move checkpoint into place at " + path + ": " + ec.message());
	}
}

Checkpoint load_checkpoint(const std::string &path)
{
	std::ifstream in(path, std::ios::binary);
	if (!in)
		throw Error("cannot open " + path);
	std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
	return deserialize_checkpoint(bytes, path);
}

Checkpoint load_checkpoint(const std::string &path, const ModelDims &expected)
{
	auto ckpt = load_checkpoint(path);
	const Model reference(ckpt.model.vocab, expected);
	const auto have = ckpt.model.store.all();
	const auto want = reference.store.all();
	for (std::size_t i = 0; i < want.size(); ++i) {
		const auto &w = want[i];
		if (i >= have.size())
			throw CheckpointError(path + ": missing array '" + w.name + "'");
		const auto &h = have[i];
		if (h.value.rows() != w.value.rows() || h.value.cols() != w.value.cols())
			throw CheckpointError(path + ": shape mismatch for array '" + h.name + "': checkpoint has " +
			                      shape_text(h.value.rows(), h.value.cols()) + ", expected " +
			                      shape_text(w.value.rows(), w.value.cols()));
	}
	return ckpt;
}

} // namespace evemb
