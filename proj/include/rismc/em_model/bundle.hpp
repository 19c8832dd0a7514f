#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "rismc/em_model/impedance.hpp"

namespace rismc::em {

// Matrix bundle, version 1. All integers are little-endian uint32, all
// reals little-endian IEEE-754 binary64.
//
//   "RISZBNDL"                      8-byte magic
//   version                         u32 (= 1)
//   M, L, N_RIS, N_e                4 x u32
//   wavelength                      f64 (meters)
//   section count                   u32
//   section*:
//     name length, name             u32, ASCII bytes (e.g. "Z_RT", "Z_G")
//     rows, cols                    2 x u32
//     entries                       rows*cols (re, im) f64 pairs, row-major
//
// Sections Z_ab exist for every ordered pair a, b of {T, R, S, O}, plus the
// diagonal terminations Z_G (MxM), Z_L (LxL) and Z_US (N_e x N_e). When
// N_e = 0 the O sections and Z_US may be omitted.
inline constexpr std::uint32_t kBundleVersion = 1;

std::vector<std::byte> save_impedance_set(const ImpedanceSet& z);
void save_impedance_set(const ImpedanceSet& z, const std::filesystem::path& path);

// Throws ParseError (byte offset) on malformed input, DimensionError or
// ContractViolation naming the offending section, ReciprocityError naming
// the block pair and entry.
ImpedanceSet load_impedance_set(std::span<const std::byte> source);
ImpedanceSet load_impedance_set(const std::filesystem::path& path);

}  // namespace rismc::em
