#pragma once

// Binary containers for ensembles, kernels and eigensystems.
//
// Layout (all three):
//   bytes 0..7    magic, e.g. "FLOWKL01"
//   bytes 8..15   header length H as little-endian uint64
//   next H bytes  UTF-8 JSON header
//   remainder     float64 payload, little-endian; nothing may follow it
//
// FLOWKL01 header {domain_length, n, m, N, seed?, generator?}; payload is X
//          column-major (m n N values).
// FLOWKK01 header {domain_length, n, m}; payload is the block tensor in
//          (k, l, i, i') row-major order (n n m m values).
// FLOWKE01 header {domain_length, n, m, J}; payload is the J eigenvalues
//          followed by the J stacked eigenflows (J + J m n values).

#include "flowkl/model.hpp"

#include <json.hpp>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace flowkl {

inline constexpr std::string_view kEnsembleMagic = "FLOWKL01";
inline constexpr std::string_view kKernelMagic = "FLOWKK01";
inline constexpr std::string_view kEigenSystemMagic = "FLOWKE01";

struct EnsembleMetadata {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> generator;
};

struct LoadedEnsemble {
    FlowEnsemble ensemble;
    EnsembleMetadata metadata;
};

std::vector<std::byte> encode_ensemble(const FlowEnsemble& ens, const EnsembleMetadata& meta = {});
std::vector<std::byte> encode_kernel(const DiscreteKernel& kernel);
std::vector<std::byte> encode_eigensystem(const EigenSystem& eig);

LoadedEnsemble decode_ensemble(std::span<const std::byte> bytes);
DiscreteKernel decode_kernel(std::span<const std::byte> bytes);
EigenSystem decode_eigensystem(std::span<const std::byte> bytes);

void write_ensemble(const std::filesystem::path& path, const FlowEnsemble& ens, const EnsembleMetadata& meta = {});
void write_kernel(const std::filesystem::path& path, const DiscreteKernel& kernel);
void write_eigensystem(const std::filesystem::path& path, const EigenSystem& eig);

LoadedEnsemble read_ensemble(const std::filesystem::path& path);
DiscreteKernel read_kernel(const std::filesystem::path& path);
EigenSystem read_eigensystem(const std::filesystem::path& path);

/// "j,lambda" rows, j starting at 1.
void write_eigenvalue_csv(const std::filesystem::path& path, const EigenSystem& eig);

struct FormatIssue {
    std::string message;
    std::uint64_t offset = 0;
};

struct FormatReport {
    bool valid = false;
    std::string magic;
    nlohmann::json header;
    std::uint64_t payload_values = 0;
    std::vector<FormatIssue> issues;
};

/// Checks magic, header consistency, payload length and finiteness.
/// Never throws on malformed content; every violation is listed with its
/// byte offset.
FormatReport validate_bytes(std::span<const std::byte> bytes);
FormatReport validate_file(const std::filesystem::path& path);

std::vector<std::byte> read_bytes(const std::filesystem::path& path);
void write_bytes(const std::filesystem::path& path, std::span<const std::byte> bytes);

/// 64-bit FNV-1a, for stable checksums in run summaries.
std::uint64_t fnv1a64(std::span<const std::byte> bytes);
std::uint64_t fnv1a64(std::string_view text);
std::string hex64(std::uint64_t value);

} // namespace flowkl
