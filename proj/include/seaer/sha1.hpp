#pragma once

#include <string>

namespace seaer {

// SHA-1 hex digest of a byte string.
std::string sha1_hex(const std::string& bytes);

// git-style blob hash: sha1("blob <len>\0" + content)
std::string git_blob_hash(const std::string& content);

// blob hash of a file's bytes
std::string git_blob_hash_file(const std::string& path);

}  // namespace seaer
