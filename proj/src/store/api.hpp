#pragma once

#include <map>
#include <string>
#include <string_view>

#include <json.hpp>

#include "store/store.hpp"

namespace pulse::api {

using Query = std::map<std::string, std::string, std::less<>>;

struct Response {
  int status = 200;
  nlohmann::json body;
};

/// Read-only /v1 router. Never mutates the snapshot.
Response handle(const store::Snapshot& snap, std::string_view method, std::string_view path, const Query& query);

/// Splits "path?a=1&b=2" and percent-decodes both parts.
std::pair<std::string, Query> split_target(std::string_view target);
std::string percent_decode(std::string_view s);

/// Integral finite doubles become JSON integers; NaN becomes null.
nlohmann::json number(double v);

}  // namespace pulse::api
