#include "dicke/app/cache.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>
#include <thread>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "dicke/app/config.hpp"

namespace dicke::app {

namespace {

constexpr char kMagic[8] = {'D', 'I', 'C', 'K', 'E', 'B', 'I', 'N'};

std::uint64_t to_le(std::uint64_t v) {
    if constexpr (std::endian::native == std::endian::little) return v;
    std::uint64_t r = 0;
    for (int i = 0; i < 8; ++i) r |= ((v >> (8 * i)) & 0xffu) << (8 * (7 - i));
    return r;
}

class Writer {
public:
    void u64(std::uint64_t v) {
        v = to_le(v);
        char b[8];
        std::memcpy(b, &v, 8);
        buf_.append(b, 8);
    }
    void i64(std::int64_t v) { u64(static_cast<std::uint64_t>(v)); }
    void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
    void c128(cplx v) {
        f64(v.real());
        f64(v.imag());
    }
    void str(const std::string& s) {
        u64(s.size());
        buf_.append(s);
    }
    void real_matrix(const Eigen::MatrixXd& m) {
        i64(m.rows());
        i64(m.cols());
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            for (Eigen::Index i = 0; i < m.rows(); ++i) f64(m(i, j));
    }
    void complex_matrix(const Eigen::MatrixXcd& m) {
        i64(m.rows());
        i64(m.cols());
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            for (Eigen::Index i = 0; i < m.rows(); ++i) c128(m(i, j));
    }
    std::string take() { return std::move(buf_); }

private:
    std::string buf_;
};

class Reader {
public:
    explicit Reader(std::string_view s) : s_(s) {}

    std::uint64_t u64() {
        need(8);
        std::uint64_t v;
        std::memcpy(&v, s_.data() + pos_, 8);
        pos_ += 8;
        return to_le(v);
    }
    std::int64_t i64() { return static_cast<std::int64_t>(u64()); }
    double f64() { return std::bit_cast<double>(u64()); }
    cplx c128() {
        const double re = f64();
        return {re, f64()};
    }
    std::string str() {
        const auto n = u64();
        need(n);
        std::string out(s_.substr(pos_, n));
        pos_ += n;
        return out;
    }
    Eigen::Index dim() {
        const auto v = i64();
        if (v < 0 || v > (1 << 24)) throw CacheCorruption("cache: implausible matrix dimension");
        return static_cast<Eigen::Index>(v);
    }
    Eigen::MatrixXd real_matrix() {
        const auto r = dim(), c = dim();
        need(static_cast<std::uint64_t>(r * c) * 8);
        Eigen::MatrixXd m(r, c);
        for (Eigen::Index j = 0; j < c; ++j)
            for (Eigen::Index i = 0; i < r; ++i) m(i, j) = f64();
        return m;
    }
    Eigen::MatrixXcd complex_matrix() {
        const auto r = dim(), c = dim();
        need(static_cast<std::uint64_t>(r * c) * 16);
        Eigen::MatrixXcd m(r, c);
        for (Eigen::Index j = 0; j < c; ++j)
            for (Eigen::Index i = 0; i < r; ++i) m(i, j) = c128();
        return m;
    }
    bool done() const { return pos_ == s_.size(); }

private:
    void need(std::uint64_t n) const {
        if (n > s_.size() - pos_) throw CacheCorruption("cache: truncated payload");
    }

    std::string_view s_;
    std::size_t pos_ = 0;
};

std::string payload(const PointData& d) {
    Writer w;
    const FloquetBasis& b = d.basis;
    w.f64(b.omega_d);
    w.u64(b.driven ? 1 : 0);
    w.i64(b.nu_max);
    w.real_matrix(b.energies);
    w.u64(b.fourier.size());
    for (const auto& f : b.fourier) w.complex_matrix(f);
    w.u64(b.degenerate_clusters.size());
    for (const auto& c : b.degenerate_clusters) {
        w.u64(c.size());
        for (auto i : c) w.i64(i);
    }
    w.u64(b.unresolved_degeneracy ? 1 : 0);

    const DissipatorData& x = d.dissipator;
    w.u64(x.tables.size());
    for (const auto& t : x.tables) {
        w.i64(t.nu_max);
        w.u64(t.elements.size());
        for (const auto& e : t.elements) w.complex_matrix(e);
    }
    w.real_matrix(x.rates);
    w.complex_matrix(x.coherence);
    w.f64(x.diagnostics.tail_fraction);
    w.u64(x.diagnostics.tail_warning ? 1 : 0);
    w.u64(x.warnings.size());
    for (const auto& s : x.warnings) w.str(s);
    return w.take();
}

PointData parse_payload(std::string_view bytes) {
    Reader r(bytes);
    PointData d;
    FloquetBasis& b = d.basis;
    b.omega_d = r.f64();
    b.driven = r.u64() != 0;
    b.nu_max = static_cast<int>(r.i64());
    b.energies = r.real_matrix();
    const auto nf = r.u64();
    if (b.nu_max < 0 || nf != 2 * static_cast<std::uint64_t>(b.nu_max) + 1)
        throw CacheCorruption("cache: Fourier table size does not match nu_max");
    for (std::uint64_t i = 0; i < nf; ++i) b.fourier.push_back(r.complex_matrix());
    const auto nc = r.u64();
    for (std::uint64_t i = 0; i < nc; ++i) {
        const auto n = r.u64();
        std::vector<Eigen::Index> c;
        for (std::uint64_t k = 0; k < n; ++k) c.push_back(static_cast<Eigen::Index>(r.i64()));
        b.degenerate_clusters.push_back(std::move(c));
    }
    b.unresolved_degeneracy = r.u64() != 0;

    DissipatorData& x = d.dissipator;
    const auto nt = r.u64();
    for (std::uint64_t i = 0; i < nt; ++i) {
        TransitionTable t;
        t.nu_max = static_cast<int>(r.i64());
        const auto ne = r.u64();
        for (std::uint64_t k = 0; k < ne; ++k) t.elements.push_back(r.complex_matrix());
        x.tables.push_back(std::move(t));
    }
    x.rates = r.real_matrix();
    x.coherence = r.complex_matrix();
    x.diagnostics.tail_fraction = r.f64();
    x.diagnostics.tail_warning = r.u64() != 0;
    const auto nw = r.u64();
    for (std::uint64_t i = 0; i < nw; ++i) x.warnings.push_back(r.str());
    if (!r.done()) throw CacheCorruption("cache: trailing bytes after payload");
    return d;
}

}  // namespace

std::string encode_point(const PointData& data) {
    const std::string body = payload(data);
    Writer head;
    head.u64(kCacheVersion);
    head.u64(body.size());
    std::string out(kMagic, sizeof kMagic);
    std::string h = head.take();
    // version is stored as u32
    out.append(h.data(), 4);
    out.append(h.data() + 8, 8);
    out += body;
    const std::string digest = sha256_hex(body.data(), body.size());
    out += digest;
    return out;
}

std::optional<PointData> decode_point(const std::string& bytes) {
    constexpr std::size_t header = sizeof kMagic + 4 + 8;
    if (bytes.size() < header || std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0)
        throw CacheCorruption("cache: bad magic");
    std::uint32_t version = 0;
    for (int i = 0; i < 4; ++i) version |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[8 + i])) << (8 * i);
    if (version != kCacheVersion) return std::nullopt;
    std::uint64_t size = 0;
    for (int i = 0; i < 8; ++i) size |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[12 + i])) << (8 * i);
    if (bytes.size() != header + size + 64) throw CacheCorruption("cache: size does not match the header");
    const std::string_view body(bytes.data() + header, size);
    const std::string_view digest(bytes.data() + header + size, 64);
    if (sha256_hex(body.data(), body.size()) != digest) throw CacheCorruption("cache: checksum mismatch");
    return parse_payload(body);
}

std::string point_key(const ModelParams& p, const SpaceConfig& space, const FloquetNumerics& num,
                      const SpectralModel& s, bool force_driven) {
    const std::string text = fmt::format(
        "v{}|N={}|w0={:.17g}|wc={:.17g}|wx={:.17g}|wd={:.17g}|g={:.17g}|Om={:.17g}|nmax={}|steps={}|order={}|nu={}|"
        "deg={:.17g}|gamma={:.17g}|T={:.17g}|lamb={}|cut={:.17g}|cells={}|forced={}",
        kCacheVersion, p.n_emitters, p.omega0, p.omega_c, p.omega_x, p.omega_d, p.g, p.drive_amplitude,
        space.photon_cutoff(), num.n_steps, num.magnus_order, num.nu_max, num.degeneracy_tol, s.gamma,
        s.temperature, s.lamb_shift, s.lamb_cutoff, s.quadrature_cells, force_driven);
    return sha256_hex(text.data(), text.size());
}

Cache::Cache(std::filesystem::path dir) : dir_(std::move(dir)) {}

std::filesystem::path Cache::path_for(const std::string& key) const { return dir_ / (key + ".bin"); }

std::optional<PointData> Cache::load(const std::string& key) const {
    if (!enabled()) return std::nullopt;
    const auto path = path_for(key);
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        auto data = decode_point(ss.str());
        if (!data) spdlog::info("cache version mismatch in {}; recomputing", path.string());
        else spdlog::info("cache hit {}", path.string());
        return data;
    } catch (const CacheCorruption& e) {
        throw CacheCorruption(fmt::format("{} ({})", e.what(), path.string()));
    }
}

void Cache::store(const std::string& key, const PointData& data) const {
    if (!enabled()) return;
    std::filesystem::create_directories(dir_);
    write_atomic(path_for(key), encode_point(data));
    spdlog::debug("cache store {}", path_for(key).string());
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
    const auto tid = std::hash<std::thread::id>{}(std::this_thread::get_id());
    auto tmp = path;
    tmp += fmt::format(".tmp{:x}", tid);
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace dicke::app
