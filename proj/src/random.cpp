#include "lapi/random.hpp"

namespace lapi {

namespace {
constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
}

std::uint64_t mix64(std::uint64_t x) noexcept {
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

RandomStream::RandomStream(std::uint64_t seed) noexcept : key_(mix64(seed + kGolden)) {}

RandomStream RandomStream::derive(std::uint64_t tag) const noexcept {
    RandomStream child;
    child.key_ = mix64(key_ ^ mix64(tag * kGolden + 0x632be59bd9b4e019ULL));
    return child;
}

std::uint64_t RandomStream::next() noexcept {
    ++counter_;
    return mix64(key_ + counter_ * kGolden);
}

std::uint64_t RandomStream::below(std::uint64_t n) noexcept {
    const std::uint64_t limit = max() - max() % n;
    std::uint64_t x;
    do {
        x = next();
    } while (x >= limit);
    return x % n;
}

}  // namespace lapi
