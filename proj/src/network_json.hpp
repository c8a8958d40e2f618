#pragma once

#include <nlohmann/json.hpp>

#include "rtc/network.hpp"

namespace rtc {

Network network_from_json(const nlohmann::json& j);

}  // namespace rtc
