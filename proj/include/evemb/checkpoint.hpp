#pragma once

// Binary checkpoint. All integers and reals little-endian.
//
//   magic        8 bytes "EVEMBCKP"
//   version      u32
//   epoch        u64
//   config       u64 length + UTF-8 "key = value" text
//   rng state    u64 length + bytes
//   vocabulary   u64 count, then per word: u32 length + bytes
//   arrays       u64 count, then per array:
//                  u32 name length + name, u32 ndim (= 2), u64 rows, u64 cols,
//                  rows*cols f64 values, rows*cols f64 Adagrad accumulators
//   checksum     u64 FNV-1a of every preceding byte
//
// Arrays appear in model layout order and must match the shapes implied by
// the stored config and vocabulary.

#include "evemb/model.hpp"
#include "evemb/trainer.hpp"

#include <cstdint>
#include <string>

namespace evemb {

inline constexpr char kCheckpointMagic[8] = {'E', 'V', 'E', 'M', 'B', 'C', 'K', 'P'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

class CheckpointError : public Error {
public:
	using Error::Error;
};

struct Checkpoint {
	TrainingConfig config;
	Model model;
	std::string rng_state;
	std::uint64_t epoch = 0;
};

std::string serialize_checkpoint(const Checkpoint &ckpt);
Checkpoint deserialize_checkpoint(const std::string &bytes, const std::string &source = "<memory>");

// Writes to a temporary sibling file and renames it into place.
void save_checkpoint(const std::string &path, const Checkpoint &ckpt);
Checkpoint load_checkpoint(const std::string &path);
// Also rejects arrays whose shapes differ from a model with `expected` dims.
Checkpoint load_checkpoint(const std::string &path, const ModelDims &expected);

} // namespace evemb
