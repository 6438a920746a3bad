#include "sfq/rng.hpp"

namespace sfq {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

std::uint64_t node_stream_seed(std::uint64_t global_seed, std::string_view node_name) {
    // FNV-1a over the name, then mixed with the global seed.
    std::uint64_t h = 14695981039346656037ULL;
    for (char c : node_name) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ULL;
    }
    return splitmix64(h ^ splitmix64(global_seed));
}

}  // namespace sfq
