#pragma once

#include <string>
#include <string_view>

namespace routerec {

// Hex SHA-1 of "blob <size>\0<content>", the object id git assigns to a file.
std::string git_blob_sha1(std::string_view content);

// git_blob_sha1 of a file's bytes. Throws IoError if unreadable.
std::string file_blob_sha1(const std::string& path);

std::string read_file(const std::string& path);

}  // namespace routerec
