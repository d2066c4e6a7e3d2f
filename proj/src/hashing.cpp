#include "kslab/hashing.hpp"

#include <openssl/evp.h>

#include <array>
#include <fstream>
#include <sstream>

#include "kslab/error.hpp"

namespace kslab {

std::string sha1_hex(std::string_view bytes) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md.data(), &len, EVP_sha1(), nullptr) != 1)
        throw Error("sha1_hex: digest failed");
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[md[i] >> 4]);
        out.push_back(hex[md[i] & 15]);
    }
    return out;
}

std::string git_blob_hash(std::string_view bytes) {
    std::string buf = "blob " + std::to_string(bytes.size());
    buf.push_back('\0');
    buf.append(bytes);
    return sha1_hex(buf);
}

std::string file_blob_hash(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return git_blob_hash(ss.str());
}

std::string combine_hashes(const std::vector<std::pair<std::string, std::string>>& entries) {
    std::string buf;
    for (const auto& [path, hash] : entries) {
        buf += path;
        buf.push_back('\0');
        buf += hash;
        buf.push_back('\n');
    }
    return sha1_hex(buf);
}

}  // namespace kslab
