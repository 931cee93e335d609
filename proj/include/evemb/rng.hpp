#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>

namespace evemb {

// mt19937_64 with distribution code of our own, so that a seed produces the
// same stream on every standard library. State round-trips through a string.
class Rng {
public:
	explicit Rng(std::uint64_t seed = 1) : engine_(seed) {}

	std::uint64_t next() { return engine_(); }

	// Uniform in [0, n). n must be positive.
	std::uint64_t uniform_index(std::uint64_t n);
	// Uniform in [0, 1) with 53 random bits.
	double uniform01();
	double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
	void fill_uniform(std::span<double> out, double lo, double hi);

	template<typename T>
	void shuffle(std::span<T> items)
	{
		for (std::size_t i = items.size(); i > 1; --i) {
			const std::size_t j = uniform_index(i);
			std::swap(items[i - 1], items[j]);
		}
	}

	std::string state() const;
	void set_state(const std::string &state);

	bool operator==(const Rng &) const = default;

private:
	std::mt19937_64 engine_;
};

} // namespace evemb
