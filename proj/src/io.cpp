#include "flowkl/io.hpp"

#include "flowkl/error.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace flowkl {

namespace {

constexpr std::size_t kMagicSize = 8;
constexpr std::size_t kPreambleSize = kMagicSize + 8;

void put_u64(std::vector<std::byte>& out, std::uint64_t v) {
    for (int b = 0; b < 8; ++b) {
        out.push_back(static_cast<std::byte>((v >> (8 * b)) & 0xffu));
    }
}

std::uint64_t get_u64(std::span<const std::byte> bytes, std::size_t at) {
    std::uint64_t v = 0;
    for (int b = 0; b < 8; ++b) {
        v |= static_cast<std::uint64_t>(bytes[at + static_cast<std::size_t>(b)]) << (8 * b);
    }
    return v;
}

void put_f64(std::vector<std::byte>& out, double x) { put_u64(out, std::bit_cast<std::uint64_t>(x)); }

double get_f64(std::span<const std::byte> bytes, std::size_t at) {
    return std::bit_cast<double>(get_u64(bytes, at));
}

std::vector<std::byte> preamble(std::string_view magic, const nlohmann::json& header, std::size_t values) {
    const std::string text = header.dump();
    std::vector<std::byte> out;
    out.reserve(kPreambleSize + text.size() + 8 * values);
    for (char c : magic) {
        out.push_back(static_cast<std::byte>(c));
    }
    put_u64(out, text.size());
    for (char c : text) {
        out.push_back(static_cast<std::byte>(c));
    }
    return out;
}

nlohmann::json grid_header(const Grid& grid, BasisTruncation trunc) {
    return nlohmann::json{{"domain_length", grid.domain_length()}, {"n", grid.n()}, {"m", trunc.m()}};
}

struct Parsed {
    FormatReport report;
    std::size_t payload_offset = 0;
};

bool positive_integer(const nlohmann::json& h, const char* key, bool allow_zero = false) {
    if (!h.contains(key) || !h[key].is_number_integer()) {
        return false;
    }
    const auto v = h[key].get<std::int64_t>();
    return allow_zero ? v >= 0 : v >= 1;
}

Parsed parse(std::span<const std::byte> bytes) {
    Parsed p;
    FormatReport& r = p.report;
    auto issue = [&r](std::string msg, std::uint64_t offset) { r.issues.push_back(FormatIssue{std::move(msg), offset}); };

    if (bytes.size() < kMagicSize) {
        issue("file is shorter than the 8-byte magic", bytes.size());
        return p;
    }
    r.magic.assign(reinterpret_cast<const char*>(bytes.data()), kMagicSize);
    if (r.magic != kEnsembleMagic && r.magic != kKernelMagic && r.magic != kEigenSystemMagic) {
        issue("unknown magic '" + r.magic + "'", 0);
        return p;
    }
    if (bytes.size() < kPreambleSize) {
        issue("file ends inside the header length field", bytes.size());
        return p;
    }
    const std::uint64_t header_len = get_u64(bytes, kMagicSize);
    if (header_len > bytes.size() - kPreambleSize) {
        issue("header length " + std::to_string(header_len) + " exceeds the " +
                  std::to_string(bytes.size() - kPreambleSize) + " bytes remaining",
              kMagicSize);
        return p;
    }
    const std::string text(reinterpret_cast<const char*>(bytes.data() + kPreambleSize), header_len);
    try {
        r.header = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        issue(std::string("header is not valid JSON: ") + e.what(), kPreambleSize + e.byte);
        return p;
    }
    p.payload_offset = kPreambleSize + header_len;

    const nlohmann::json& h = r.header;
    if (!h.is_object()) {
        issue("header must be a JSON object", kPreambleSize);
        return p;
    }
    bool ok = true;
    if (!h.contains("domain_length") || !h["domain_length"].is_number() ||
        !(h["domain_length"].get<double>() > 0.0) || !std::isfinite(h["domain_length"].get<double>())) {
        issue("header field 'domain_length' must be a positive number", kPreambleSize);
        ok = false;
    }
    for (const char* key : {"n", "m"}) {
        if (!positive_integer(h, key)) {
            issue(std::string("header field '") + key + "' must be a positive integer", kPreambleSize);
            ok = false;
        }
    }
    std::uint64_t expected = 0;
    if (ok) {
        const auto n = h["n"].get<std::uint64_t>();
        const auto m = h["m"].get<std::uint64_t>();
        if (r.magic == kEnsembleMagic) {
            if (!positive_integer(h, "N", true)) {
                issue("header field 'N' must be a nonnegative integer", kPreambleSize);
                ok = false;
            } else {
                expected = m * n * h["N"].get<std::uint64_t>();
            }
            if (h.contains("seed") && !h["seed"].is_number_unsigned()) {
                issue("header field 'seed' must be an unsigned integer", kPreambleSize);
                ok = false;
            }
            if (h.contains("generator") && !h["generator"].is_string()) {
                issue("header field 'generator' must be a string", kPreambleSize);
                ok = false;
            }
        } else if (r.magic == kKernelMagic) {
            expected = n * n * m * m;
        } else {
            if (!positive_integer(h, "J", true) || h["J"].get<std::uint64_t>() > m * n) {
                issue("header field 'J' must be an integer in [0, m*n]", kPreambleSize);
                ok = false;
            } else {
                const auto J = h["J"].get<std::uint64_t>();
                expected = J + J * m * n;
            }
        }
    }
    if (!ok) {
        return p;
    }
    r.payload_values = expected;
    const std::uint64_t expected_bytes = 8 * expected;
    const std::uint64_t actual_bytes = bytes.size() - p.payload_offset;
    if (actual_bytes < expected_bytes) {
        issue("payload truncated: expected " + std::to_string(expected_bytes) + " bytes, found " +
                  std::to_string(actual_bytes),
              bytes.size());
        return p;
    }
    if (actual_bytes > expected_bytes) {
        issue("trailing bytes: expected " + std::to_string(expected_bytes) + " payload bytes, found " +
                  std::to_string(actual_bytes),
              p.payload_offset + expected_bytes);
        return p;
    }
    for (std::uint64_t v = 0; v < expected; ++v) {
        const std::size_t at = p.payload_offset + 8 * v;
        if (!std::isfinite(get_f64(bytes, at))) {
            issue("non-finite value at payload index " + std::to_string(v), at);
            return p;
        }
    }
    r.valid = true;
    return p;
}

Parsed parse_expecting(std::span<const std::byte> bytes, std::string_view magic) {
    Parsed p = parse(bytes);
    if (!p.report.valid) {
        const FormatIssue& first = p.report.issues.front();
        throw FormatError(first.message, first.offset);
    }
    if (p.report.magic != magic) {
        throw FormatError("expected magic '" + std::string(magic) + "', found '" + p.report.magic + "'", 0);
    }
    return p;
}

MatrixXd read_matrix(std::span<const std::byte> bytes, std::size_t offset, Index rows, Index cols) {
    MatrixXd out(rows, cols);
    double* dst = out.data();
    for (Index v = 0; v < rows * cols; ++v) {
        dst[v] = get_f64(bytes, offset + 8 * static_cast<std::size_t>(v));
    }
    return out;
}

} // namespace

std::vector<std::byte> encode_ensemble(const FlowEnsemble& ens, const EnsembleMetadata& meta) {
    nlohmann::json header = grid_header(ens.grid(), ens.trunc());
    header["N"] = ens.size();
    if (meta.seed) {
        header["seed"] = *meta.seed;
    }
    if (meta.generator) {
        header["generator"] = *meta.generator;
    }
    const auto values = static_cast<std::size_t>(ens.data().size());
    std::vector<std::byte> out = preamble(kEnsembleMagic, header, values);
    const double* src = ens.data().data();
    for (std::size_t v = 0; v < values; ++v) {
        put_f64(out, src[v]);
    }
    return out;
}

std::vector<std::byte> encode_kernel(const DiscreteKernel& kernel) {
    const Index n = kernel.grid().n();
    const Index m = kernel.trunc().m();
    std::vector<std::byte> out =
        preamble(kKernelMagic, grid_header(kernel.grid(), kernel.trunc()), static_cast<std::size_t>(n * n * m * m));
    for (Index k = 0; k < n; ++k) {
        for (Index l = 0; l < n; ++l) {
            for (Index i = 0; i < m; ++i) {
                for (Index ip = 0; ip < m; ++ip) {
                    put_f64(out, kernel.assembly()(k * m + i, l * m + ip));
                }
            }
        }
    }
    return out;
}

std::vector<std::byte> encode_eigensystem(const EigenSystem& eig) {
    nlohmann::json header = grid_header(eig.grid(), eig.trunc());
    header["J"] = eig.count();
    const auto flows = static_cast<std::size_t>(eig.eigenflows().size());
    std::vector<std::byte> out =
        preamble(kEigenSystemMagic, header, static_cast<std::size_t>(eig.count()) + flows);
    for (Index j = 0; j < eig.count(); ++j) {
        put_f64(out, eig.eigenvalues()(j));
    }
    const double* src = eig.eigenflows().data();
    for (std::size_t v = 0; v < flows; ++v) {
        put_f64(out, src[v]);
    }
    return out;
}

LoadedEnsemble decode_ensemble(std::span<const std::byte> bytes) {
    const Parsed p = parse_expecting(bytes, kEnsembleMagic);
    const nlohmann::json& h = p.report.header;
    const Grid grid(h["n"].get<Index>(), h["domain_length"].get<double>());
    const BasisTruncation trunc(h["m"].get<Index>());
    EnsembleMetadata meta;
    if (h.contains("seed")) {
        meta.seed = h["seed"].get<std::uint64_t>();
    }
    if (h.contains("generator")) {
        meta.generator = h["generator"].get<std::string>();
    }
    MatrixXd x = read_matrix(bytes, p.payload_offset, grid.n() * trunc.m(), h["N"].get<Index>());
    return LoadedEnsemble{FlowEnsemble(grid, trunc, std::move(x)), std::move(meta)};
}

DiscreteKernel decode_kernel(std::span<const std::byte> bytes) {
    const Parsed p = parse_expecting(bytes, kKernelMagic);
    const nlohmann::json& h = p.report.header;
    const Grid grid(h["n"].get<Index>(), h["domain_length"].get<double>());
    const BasisTruncation trunc(h["m"].get<Index>());
    const Index n = grid.n();
    const Index m = trunc.m();
    MatrixXd a(n * m, n * m);
    std::size_t at = p.payload_offset;
    for (Index k = 0; k < n; ++k) {
        for (Index l = 0; l < n; ++l) {
            for (Index i = 0; i < m; ++i) {
                for (Index ip = 0; ip < m; ++ip) {
                    a(k * m + i, l * m + ip) = get_f64(bytes, at);
                    at += 8;
                }
            }
        }
    }
    return DiscreteKernel(grid, trunc, std::move(a));
}

EigenSystem decode_eigensystem(std::span<const std::byte> bytes) {
    const Parsed p = parse_expecting(bytes, kEigenSystemMagic);
    const nlohmann::json& h = p.report.header;
    const Grid grid(h["n"].get<Index>(), h["domain_length"].get<double>());
    const BasisTruncation trunc(h["m"].get<Index>());
    const auto J = h["J"].get<Index>();
    VectorXd values = read_matrix(bytes, p.payload_offset, J, 1);
    MatrixXd flows = read_matrix(bytes, p.payload_offset + 8 * static_cast<std::size_t>(J), grid.n() * trunc.m(), J);
    return EigenSystem(grid, trunc, std::move(values), std::move(flows));
}

std::vector<std::byte> read_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open '" + path.string() + "' for reading");
    }
    in.seekg(0, std::ios::end);
    const auto size = static_cast<std::size_t>(in.tellg());
    in.seekg(0, std::ios::beg);
    std::vector<std::byte> bytes(size);
    in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(size));
    if (!in) {
        throw Error("failed reading '" + path.string() + "'");
    }
    return bytes;
}

void write_bytes(const std::filesystem::path& path, std::span<const std::byte> bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error("cannot open '" + path.string() + "' for writing");
    }
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw Error("failed writing '" + path.string() + "'");
    }
}

void write_ensemble(const std::filesystem::path& path, const FlowEnsemble& ens, const EnsembleMetadata& meta) {
    write_bytes(path, encode_ensemble(ens, meta));
}

void write_kernel(const std::filesystem::path& path, const DiscreteKernel& kernel) {
    write_bytes(path, encode_kernel(kernel));
}

void write_eigensystem(const std::filesystem::path& path, const EigenSystem& eig) {
    write_bytes(path, encode_eigensystem(eig));
}

LoadedEnsemble read_ensemble(const std::filesystem::path& path) { return decode_ensemble(read_bytes(path)); }

DiscreteKernel read_kernel(const std::filesystem::path& path) { return decode_kernel(read_bytes(path)); }

EigenSystem read_eigensystem(const std::filesystem::path& path) { return decode_eigensystem(read_bytes(path)); }

void write_eigenvalue_csv(const std::filesystem::path& path, const EigenSystem& eig) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw Error("cannot open '" + path.string() + "' for writing");
    }
    out << "j,lambda\n" << std::setprecision(17);
    for (Index j = 0; j < eig.count(); ++j) {
        out << (j + 1) << ',' << eig.eigenvalues()(j) << '\n';
    }
}

FormatReport validate_bytes(std::span<const std::byte> bytes) { return parse(bytes).report; }

FormatReport validate_file(const std::filesystem::path& path) { return validate_bytes(read_bytes(path)); }

std::uint64_t fnv1a64(std::span<const std::byte> bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (std::byte b : bytes) {
        h ^= static_cast<std::uint64_t>(b);
        h *= 0x100000001b3ull;
    }
    return h;
}

std::uint64_t fnv1a64(std::string_view text) {
    return fnv1a64(std::as_bytes(std::span<const char>(text.data(), text.size())));
}

std::string hex64(std::uint64_t value) {
    std::ostringstream s;
    s << std::hex << std::setw(16) << std::setfill('0') << value;
    return s.str();
}

} // namespace flowkl
