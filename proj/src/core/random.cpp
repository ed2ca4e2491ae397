#include "core/random.hpp"

namespace moran {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

constexpr std::uint32_t lo32(std::uint64_t x) { return static_cast<std::uint32_t>(x); }
constexpr std::uint32_t hi32(std::uint64_t x) { return static_cast<std::uint32_t>(x >> 32); }

// Separates seed-derivation blocks from trajectory draws made with the same key.
constexpr std::uint32_t kDeriveTag0 = 0x5EEDDE21u;
constexpr std::uint32_t kDeriveTag1 = 0x7A3C91B5u;

} // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> c, std::array<std::uint32_t, 2> k)
{
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            k[0] += kWeyl0;
            k[1] += kWeyl1;
        }
        const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * c[0];
        const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * c[2];
        c = {hi32(p1) ^ c[1] ^ k[0], lo32(p1), hi32(p0) ^ c[3] ^ k[1], lo32(p0)};
    }
    return c;
}

std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t index)
{
    const auto out = philox4x32({lo32(index), hi32(index), kDeriveTag0, kDeriveTag1}, {lo32(base_seed), hi32(base_seed)});
    return (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
}

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t substream) : seed_(seed), substream_(substream) {}

void RandomStream::refill()
{
    buffer_ = philox4x32({lo32(block_), hi32(block_), lo32(substream_), hi32(substream_)}, {lo32(seed_), hi32(seed_)});
    ++block_;
    used_ = 0;
}

RandomStream::result_type RandomStream::operator()()
{
    if (used_ > 2)
        refill();
    const std::uint64_t lo = buffer_[used_];
    const std::uint64_t hi = buffer_[used_ + 1];
    used_ += 2;
    return (hi << 32) | lo;
}

double RandomStream::uniform()
{
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
}

namespace {
__extension__ typedef unsigned __int128 u128;
} // namespace

std::uint64_t RandomStream::below(std::uint64_t n)
{
    // Lemire's nearly-divisionless bounded draw.
    u128 m = static_cast<u128>((*this)()) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
        const std::uint64_t threshold = (0 - n) % n;
        while (low < threshold) {
            m = static_cast<u128>((*this)()) * n;
            low = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::uint64_t>(m >> 64);
}

} // namespace moran
