#pragma once

#include <map>
#include <string>
#include <vector>

namespace fewbit {

using KvMap = std::map<std::string, std::string>;

// Plain key=value lines; '#' starts a comment, blank lines ignored.
KvMap parse_kv_file(const std::string& path);
KvMap parse_kv_text(const std::string& text);

bool kv_has(const KvMap& kv, const std::string& key);
std::string kv_str(const KvMap& kv, const std::string& key, const std::string& fallback);
int kv_int(const KvMap& kv, const std::string& key, int fallback);
double kv_double(const KvMap& kv, const std::string& key, double fallback);
bool kv_bool(const KvMap& kv, const std::string& key, bool fallback);
std::vector<std::string> split_list(const std::string& s);
std::vector<double> parse_double_list(const std::string& s);

}  // namespace fewbit
