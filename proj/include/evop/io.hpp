#ifndef EVOP_IO_HPP
#define EVOP_IO_HPP

#include <filesystem>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "evop/model.hpp"

namespace evop {

/// Malformed input. The message names the offending line or JSON field path.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

nlohmann::json to_json(const Location& loc);
nlohmann::json to_json(const Instance& inst);
nlohmann::json to_json(const Schedule& s);
nlohmann::json to_json(const Action& a);

/// Strict decoding: unknown keys, missing keys and invariant violations raise ParseError.
Instance instance_from_json(const nlohmann::json& j);
Schedule schedule_from_json(const nlohmann::json& j);

/// Parses text, reporting syntax errors with line and column.
nlohmann::json parse_json_text(const std::string& text, const std::string& origin);
nlohmann::json read_json_file(const std::filesystem::path& path);
void write_json_file(const nlohmann::json& j, const std::filesystem::path& path);

Instance load_instance(const std::filesystem::path& path);
void save_instance(const Instance& inst, const std::filesystem::path& path);
Schedule load_schedule(const std::filesystem::path& path);
void save_schedule(const Schedule& s, const std::filesystem::path& path);

std::string dump(const nlohmann::json& j);

}  // namespace evop

#endif  // EVOP_IO_HPP
