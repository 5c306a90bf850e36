#include "ltrank/binio.hpp"

#include <fstream>
#include <vector>

namespace ltrank::binio {

std::uint64_t fnv1a64_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(errc::io, "cannot open file for hashing: " + path);
    std::uint64_t h = 0xcbf29ce484222325ull;
    std::vector<char> buffer(1 << 20);
    while (in) {
        in.read(buffer.data(), static_cast<std::streamsize>(buffer.size()));
        std::streamsize got = in.gcount();
        if (got > 0) h = fnv1a64(buffer.data(), static_cast<std::size_t>(got), h);
    }
    return h;
}

}  // namespace ltrank::binio
