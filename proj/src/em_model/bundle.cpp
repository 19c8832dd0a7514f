#include "rismc/em_model/bundle.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <map>
#include <optional>
#include <string>

#include "rismc/errors.hpp"

namespace rismc::em {

namespace {

constexpr char kMagic[8] = {'R', 'I', 'S', 'Z', 'B', 'N', 'D', 'L'};

class Writer
{
public:
    void raw(const void* data, std::size_t n)
    {
        const auto* p = static_cast<const std::byte*>(data);
        out_.insert(out_.end(), p, p + n);
    }
    void u32(std::uint32_t v)
    {
        for (int i = 0; i < 4; ++i) {
            out_.push_back(static_cast<std::byte>((v >> (8 * i)) & 0xffu));
        }
    }
    void f64(double v)
    {
        const auto bits = std::bit_cast<std::uint64_t>(v);
        for (int i = 0; i < 8; ++i) {
            out_.push_back(static_cast<std::byte>((bits >> (8 * i)) & 0xffu));
        }
    }
    void matrix(const std::string& name, const CMatrix& m)
    {
        u32(static_cast<std::uint32_t>(name.size()));
        raw(name.data(), name.size());
        u32(static_cast<std::uint32_t>(m.rows()));
        u32(static_cast<std::uint32_t>(m.cols()));
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            for (Eigen::Index j = 0; j < m.cols(); ++j) {
                f64(m(i, j).real());
                f64(m(i, j).imag());
            }
        }
    }
    std::vector<std::byte> take() { return std::move(out_); }

private:
    std::vector<std::byte> out_;
};

class Reader
{
public:
    explicit Reader(std::span<const std::byte> in) : in_(in) {}

    std::size_t offset() const noexcept { return pos_; }

    void need(std::size_t n, const char* what) const
    {
        if (in_.size() - pos_ < n) {
            throw ParseError(pos_, std::string("truncated input while reading ") + what, false);
        }
    }
    std::uint32_t u32(const char* what)
    {
        need(4, what);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) {
            v |= static_cast<std::uint32_t>(in_[pos_ + i]) << (8 * i);
        }
        pos_ += 4;
        return v;
    }
    double f64(const char* what)
    {
        need(8, what);
        std::uint64_t bits = 0;
        for (int i = 0; i < 8; ++i) {
            bits |= static_cast<std::uint64_t>(in_[pos_ + i]) << (8 * i);
        }
        pos_ += 8;
        return std::bit_cast<double>(bits);
    }
    std::string text(std::size_t n)
    {
        need(n, "section name");
        std::string s(reinterpret_cast<const char*>(in_.data() + pos_), n);
        pos_ += n;
        return s;
    }

private:
    std::span<const std::byte> in_;
    std::size_t pos_ = 0;
};

std::string block_section(Group a, Group b)
{
    return "Z_" + std::string(group_name(a)) + std::string(group_name(b));
}

CMatrix diag_matrix(const CVector& v)
{
    CMatrix m = CMatrix::Zero(v.size(), v.size());
    m.diagonal() = v;
    return m;
}

}  // namespace

std::vector<std::byte> save_impedance_set(const ImpedanceSet& z)
{
    Writer w;
    w.raw(kMagic, sizeof kMagic);
    w.u32(kBundleVersion);
    w.u32(static_cast<std::uint32_t>(z.m()));
    w.u32(static_cast<std::uint32_t>(z.l()));
    w.u32(static_cast<std::uint32_t>(z.n_ris()));
    w.u32(static_cast<std::uint32_t>(z.n_e()));
    w.f64(z.wavelength());
    w.u32(16 + 3);
    for (Group a : kGroups) {
        for (Group b : kGroups) {
            w.matrix(block_section(a, b), z.block(a, b));
        }
    }
    w.matrix("Z_G", diag_matrix(z.z_g()));
    w.matrix("Z_L", diag_matrix(z.z_l()));
    w.matrix("Z_US", diag_matrix(z.z_us()));
    return w.take();
}

void save_impedance_set(const ImpedanceSet& z, const std::filesystem::path& path)
{
    const auto bytes = save_impedance_set(z);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error("cannot open " + path.string() + " for writing");
    }
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw Error("failed writing " + path.string());
    }
}

ImpedanceSet load_impedance_set(std::span<const std::byte> source)
{
    Reader r(source);
    r.need(sizeof kMagic, "magic");
    if (std::memcmp(source.data(), kMagic, sizeof kMagic) != 0) {
        throw ParseError(0, "not a matrix bundle (bad magic)", false);
    }
    r.text(sizeof kMagic);

    const std::size_t version_at = r.offset();
    const auto version = r.u32("version");
    if (version != kBundleVersion) {
        throw ParseError(version_at, "unsupported bundle version " + std::to_string(version), false);
    }
    std::array<Eigen::Index, 4> dims{};
    for (auto& d : dims) {
        d = r.u32("dimensions");
    }
    const double wavelength = r.f64("wavelength");
    const auto count = r.u32("section count");

    const std::array<Eigen::Index, 4> group_size = dims;  // T, R, S, O order
    std::map<std::string, CMatrix> sections;
    for (std::uint32_t s = 0; s < count; ++s) {
        const std::size_t section_at = r.offset();
        const auto name_len = r.u32("section name length");
        if (name_len == 0 || name_len > 64) {
            throw ParseError(section_at, "invalid section name length", false);
        }
        std::string name = r.text(name_len);
        const auto rows = r.u32("section rows");
        const auto cols = r.u32("section cols");
        const std::uint64_t entries = std::uint64_t{rows} * cols;
        if (entries > source.size() / 16) {
            throw ParseError(r.offset(), "section " + name + " payload exceeds input size", false);
        }
        r.need(static_cast<std::size_t>(entries * 16), "section payload");
        CMatrix m(rows, cols);
        for (std::uint32_t i = 0; i < rows; ++i) {
            for (std::uint32_t j = 0; j < cols; ++j) {
                const double re = r.f64("entry");
                const double im = r.f64("entry");
                m(i, j) = cplx(re, im);
            }
        }
        if (!sections.emplace(name, std::move(m)).second) {
            throw ParseError(section_at, "duplicate section " + name, false);
        }
    }
    if (r.offset() != source.size()) {
        throw ParseError(r.offset(), "trailing bytes after last section", false);
    }

    auto fetch = [&](const std::string& name, Eigen::Index rows, Eigen::Index cols,
                     bool optional) -> CMatrix {
        auto it = sections.find(name);
        if (it == sections.end()) {
            if (optional) {
                return CMatrix(rows, cols);
            }
            throw DimensionError("bundle is missing section " + name);
        }
        if (it->second.rows() != rows || it->second.cols() != cols) {
            throw DimensionError("section " + name + " is " + std::to_string(it->second.rows()) +
                                 "x" + std::to_string(it->second.cols()) + ", expected " +
                                 std::to_string(rows) + "x" + std::to_string(cols));
        }
        return it->second;
    };
    const bool no_scatterers = group_size[3] == 0;

    std::array<std::array<CMatrix, 4>, 4> blocks;
    for (std::size_t a = 0; a < 4; ++a) {
        for (std::size_t b = 0; b < 4; ++b) {
            const bool touches_o = a == 3 || b == 3;
            blocks[a][b] = fetch(block_section(kGroups[a], kGroups[b]), group_size[a],
                                 group_size[b], no_scatterers && touches_o);
        }
    }
    auto diagonal_of = [&](const std::string& name, Eigen::Index n, bool optional) {
        const CMatrix m = fetch(name, n, n, optional);
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < n; ++j) {
                if (i != j && m(i, j) != cplx(0.0, 0.0)) {
                    throw ContractViolation("section " + name + " is not diagonal at (" +
                                            std::to_string(i) + "," + std::to_string(j) + ")");
                }
            }
        }
        return CVector(m.diagonal());
    };
    CVector z_g = diagonal_of("Z_G", group_size[0], false);
    CVector z_l = diagonal_of("Z_L", group_size[1], false);
    CVector z_us = diagonal_of("Z_US", group_size[3], no_scatterers);
    return ImpedanceSet(wavelength, std::move(blocks), std::move(z_g), std::move(z_l),
                        std::move(z_us));
}

ImpedanceSet load_impedance_set(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open bundle " + path.string());
    }
    std::vector<char> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return load_impedance_set(std::as_bytes(std::span(raw)));
}

}  // namespace rismc::em
