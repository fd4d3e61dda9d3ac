#include "waveleton/io.hpp"

#include <bit>
#include <cerrno>
#include <cinttypes>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "waveleton/errors.hpp"

namespace waveleton {

std::string format_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// ---------------------------------------------------------------------------
// SHA-256 (FIPS 180-4), self-contained to keep artifact checksums dependency-
// free and identical across platforms.
namespace {

constexpr std::uint32_t kSha256K[64] = {
    0x428a2f98, 0x71374491, 0xb5c0fbcf, 0xe9b5dba5, 0x3956c25b, 0x59f111f1,
    0x923f82a4, 0xab1c5ed5, 0xd807aa98, 0x12835b01, 0x243185be, 0x550c7dc3,
    0x72be5d74, 0x80deb1fe, 0x9bdc06a7, 0xc19bf174, 0xe49b69c1, 0xefbe4786,
    0x0fc19dc6, 0x240ca1cc, 0x2de92c6f, 0x4a7484aa, 0x5cb0a9dc, 0x76f988da,
    0x983e5152, 0xa831c66d, 0xb00327c8, 0xbf597fc7, 0xc6e00bf3, 0xd5a79147,
    0x06ca6351, 0x14292967, 0x27b70a85, 0x2e1b2138, 0x4d2c6dfc, 0x53380d13,
    0x650a7354, 0x766a0abb, 0x81c2c92e, 0x92722c85, 0xa2bfe8a1, 0xa81a664b,
    0xc24b8b70, 0xc76c51a3, 0xd192e819, 0xd6990624, 0xf40e3585, 0x106aa070,
    0x19a4c116, 0x1e376c08, 0x2748774c, 0x34b0bcb5, 0x391c0cb3, 0x4ed8aa4a,
    0x5b9cca4f, 0x682e6ff3, 0x748f82ee, 0x78a5636f, 0x84c87814, 0x8cc70208,
    0x90befffa, 0xa4506ceb, 0xbef9a3f7, 0xc67178f2};

inline std::uint32_t rotr(std::uint32_t x, int n) {
    return (x >> n) | (x << (32 - n));
}

struct Sha256State {
    std::uint32_t h[8] = {0x6a09e667, 0xbb67ae85, 0x3c6ef372, 0xa54ff53a,
                          0x510e527f, 0x9b05688c, 0x1f83d9ab, 0x5be0cd19};
    std::uint64_t total = 0;
    unsigned char block[64];
    std::size_t fill = 0;

    void compress(const unsigned char* p) {
        std::uint32_t w[64];
        for (int t = 0; t < 16; ++t)
            w[t] = (std::uint32_t(p[4 * t]) << 24) |
                   (std::uint32_t(p[4 * t + 1]) << 16) |
                   (std::uint32_t(p[4 * t + 2]) << 8) |
                   std::uint32_t(p[4 * t + 3]);
        for (int t = 16; t < 64; ++t) {
            const std::uint32_t s0 =
                rotr(w[t - 15], 7) ^ rotr(w[t - 15], 18) ^ (w[t - 15] >> 3);
            const std::uint32_t s1 =
                rotr(w[t - 2], 17) ^ rotr(w[t - 2], 19) ^ (w[t - 2] >> 10);
            w[t] = w[t - 16] + s0 + w[t - 7] + s1;
        }
        std::uint32_t a = h[0], b = h[1], c = h[2], d = h[3];
        std::uint32_t e = h[4], f = h[5], g = h[6], hh = h[7];
        for (int t = 0; t < 64; ++t) {
            const std::uint32_t S1 = rotr(e, 6) ^ rotr(e, 11) ^ rotr(e, 25);
            const std::uint32_t ch = (e & f) ^ (~e & g);
            const std::uint32_t t1 = hh + S1 + ch + kSha256K[t] + w[t];
            const std::uint32_t S0 = rotr(a, 2) ^ rotr(a, 13) ^ rotr(a, 22);
            const std::uint32_t maj = (a & b) ^ (a & c) ^ (b & c);
            const std::uint32_t t2 = S0 + maj;
            hh = g;
            g = f;
            f = e;
            e = d + t1;
            d = c;
            c = b;
            b = a;
            a = t1 + t2;
        }
        h[0] += a;
        h[1] += b;
        h[2] += c;
        h[3] += d;
        h[4] += e;
        h[5] += f;
        h[6] += g;
        h[7] += hh;
    }

    void update(const unsigned char* data, std::size_t len) {
        total += len;
        while (len > 0) {
            const std::size_t take = std::min(len, std::size_t(64) - fill);
            std::memcpy(block + fill, data, take);
            fill += take;
            data += take;
            len -= take;
            if (fill == 64) {
                compress(block);
                fill = 0;
            }
        }
    }

    std::string finish() {
        const std::uint64_t bits = total * 8;
        unsigned char pad = 0x80;
        update(&pad, 1);
        const unsigned char zero = 0x00;
        while (fill != 56) update(&zero, 1);
        unsigned char lenb[8];
        for (int i = 0; i < 8; ++i)
            lenb[i] = static_cast<unsigned char>(bits >> (56 - 8 * i));
        update(lenb, 8);
        std::string out(64, '0');
        static const char* hex = "0123456789abcdef";
        for (int i = 0; i < 8; ++i)
            for (int b = 0; b < 4; ++b) {
                const unsigned byte = (h[i] >> (24 - 8 * b)) & 0xff;
                out[static_cast<std::size_t>(8 * i + 2 * b)] = hex[byte >> 4];
                out[static_cast<std::size_t>(8 * i + 2 * b + 1)] = hex[byte & 15];
            }
        return out;
    }
};

}  // namespace

std::string sha256_hex(const void* data, std::size_t len) {
    Sha256State s;
    s.update(static_cast<const unsigned char*>(data), len);
    return s.finish();
}

std::string sha256_hex(const std::string& bytes) {
    return sha256_hex(bytes.data(), bytes.size());
}

std::string sha256_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for checksum: " + path);
    Sha256State s;
    char buf[1 << 16];
    while (in) {
        in.read(buf, sizeof(buf));
        s.update(reinterpret_cast<const unsigned char*>(buf),
                 static_cast<std::size_t>(in.gcount()));
    }
    if (in.bad()) throw IoError("read failed during checksum: " + path);
    return s.finish();
}

// ---------------------------------------------------------------------------

std::string read_file_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path);
    std::ostringstream out;
    out << in.rdbuf();
    if (in.bad()) throw IoError("read failed: " + path);
    return out.str();
}

void atomic_write_bytes(const std::string& path, const std::string& bytes) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot create: " + tmp);
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        out.flush();
        if (!out) throw IoError("write failed: " + tmp);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw IoError("rename to " + path + " failed");
    }
}

// ---------------------------------------------------------------------------

namespace {

constexpr char kGridMagic[4] = {'W', 'G', 'R', 'D'};
constexpr std::uint32_t kGridVersion = 1;

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i)
        out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f64(std::string& out, double v) {
    const std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i)
        out.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
}

std::uint32_t get_u32(const std::string& in, std::size_t pos) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
        v |= std::uint32_t(static_cast<unsigned char>(in[pos + i])) << (8 * i);
    return v;
}

double get_f64(const std::string& in, std::size_t pos) {
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i)
        bits |= std::uint64_t(static_cast<unsigned char>(in[pos + i])) << (8 * i);
    return std::bit_cast<double>(bits);
}

}  // namespace

std::string encode_grid(const Grid2D& g) {
    if (g.nq <= 0 || g.np <= 0 ||
        g.values.size() != static_cast<std::size_t>(g.nq) * g.np)
        throw IoError("grid dimensions do not match the value count");
    std::string out;
    out.reserve(48 + g.values.size() * 8);
    out.append(kGridMagic, 4);
    put_u32(out, kGridVersion);
    put_u32(out, static_cast<std::uint32_t>(g.nq));
    put_u32(out, static_cast<std::uint32_t>(g.np));
    put_f64(out, g.q_min);
    put_f64(out, g.q_max);
    put_f64(out, g.p_min);
    put_f64(out, g.p_max);
    for (double v : g.values) put_f64(out, v);
    return out;
}

Grid2D decode_grid(const std::string& bytes) {
    if (bytes.size() < 48 || std::memcmp(bytes.data(), kGridMagic, 4) != 0)
        throw IoError("not a WGRD grid file");
    if (get_u32(bytes, 4) != kGridVersion)
        throw IoError("unsupported WGRD version");
    Grid2D g;
    const std::uint64_t nq = get_u32(bytes, 8);
    const std::uint64_t np = get_u32(bytes, 12);
    if (nq == 0 || np == 0 || nq * np > (std::uint64_t(1) << 30))
        throw IoError("unreasonable WGRD dimensions");
    if (bytes.size() != 48 + nq * np * 8)
        throw IoError("WGRD payload size mismatch");
    g.nq = static_cast<int>(nq);
    g.np = static_cast<int>(np);
    g.q_min = get_f64(bytes, 16);
    g.q_max = get_f64(bytes, 24);
    g.p_min = get_f64(bytes, 32);
    g.p_max = get_f64(bytes, 40);
    g.values.resize(nq * np);
    for (std::size_t k = 0; k < g.values.size(); ++k)
        g.values[k] = get_f64(bytes, 48 + 8 * k);
    return g;
}

void write_grid_file(const std::string& path, const Grid2D& g) {
    atomic_write_bytes(path, encode_grid(g));
}

Grid2D read_grid_file(const std::string& path) {
    return decode_grid(read_file_bytes(path));
}

// ---------------------------------------------------------------------------

std::string encode_pgm(const Grid2D& g) {
    if (g.nq <= 0 || g.np <= 0 ||
        g.values.size() != static_cast<std::size_t>(g.nq) * g.np)
        throw IoError("grid dimensions do not match the value count");
    double lo = g.values[0], hi = g.values[0];
    for (double v : g.values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    std::string out = "P5\n";
    out += "# linear min-max map: byte = round(255*(v-min)/(max-min)), min=" +
           format_g17(lo) + ", max=" + format_g17(hi) +
           "; all-equal grids map to 0\n";
    out += "# rows: q index ascending, columns: p index ascending\n";
    out += std::to_string(g.np) + " " + std::to_string(g.nq) + "\n255\n";
    const double span = hi - lo;
    for (int i = 0; i < g.nq; ++i)
        for (int j = 0; j < g.np; ++j) {
            const double v = g.at(i, j);
            const int byte =
                span > 0.0
                    ? static_cast<int>(std::lround(255.0 * (v - lo) / span))
                    : 0;
            out.push_back(static_cast<char>(std::clamp(byte, 0, 255)));
        }
    return out;
}

void write_pgm_file(const std::string& path, const Grid2D& g) {
    atomic_write_bytes(path, encode_pgm(g));
}

// ---------------------------------------------------------------------------

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
    std::string out;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (c) out.push_back(',');
        out += header[c];
    }
    out.push_back('\n');
    for (const auto& row : rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out.push_back(',');
            out += row[c];
        }
        out.push_back('\n');
    }
    atomic_write_bytes(path, out);
}

std::vector<std::vector<double>> read_csv_numbers(const std::string& path) {
    const std::string bytes = read_file_bytes(path);
    std::vector<std::vector<double>> rows;
    std::istringstream lines(bytes);
    std::string line;
    bool first = true;
    while (std::getline(lines, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        bool blank = true;
        for (char ch : line)
            if (!std::isspace(static_cast<unsigned char>(ch))) blank = false;
        if (blank) continue;
        std::vector<double> row;
        std::string cell;
        std::istringstream cells(line);
        bool bad = false;
        while (std::getline(cells, cell, ',')) {
            // strtod so subnormal values parse (underflow is not an error);
            // reject syntax errors, trailing junk, and overflow.
            const char* begin = cell.c_str();
            char* end = nullptr;
            errno = 0;
            const double v = std::strtod(begin, &end);
            if (end == begin) {
                bad = true;
                break;
            }
            while (*end == ' ' || *end == '\t') ++end;
            if (*end != '\0' || (errno == ERANGE && std::abs(v) == HUGE_VAL)) {
                bad = true;
                break;
            }
            row.push_back(v);
        }
        if (bad) {
            if (first) {
                first = false;  // header line
                continue;
            }
            throw IoError("non-numeric CSV cell in " + path);
        }
        first = false;
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace waveleton
