#include "evemb/rng.hpp"

#include "evemb/tensor.hpp"

#include <limits>
#include <sstream>

namespace evemb {

std::uint64_t Rng::uniform_index(std::uint64_t n)
{
	if (n == 0)
		throw Error("uniform_index: empty range");
	// Rejection sampling on the top of the range keeps draws exactly uniform.
	const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
	std::uint64_t x;
	do {
		x = engine_();
	} while (x >= limit);
	return x % n;
}

double Rng::uniform01()
{
	return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

void Rng::fill_uniform(std::span<double> out, double lo, double hi)
{
	for (double &v : out)
		v = uniform(lo, hi);
}

std::string Rng::state() const
{
	std::ostringstream os;
	os << engine_;
	return os.str();
}

void Rng::set_state(const std::string &state)
{
	std::istringstream is(state);
	std::mt19937_64 e;
	is >> e;
	if (is.fail())
		throw Error("invalid random generator state");
	engine_ = e;
}

} // namespace evemb
