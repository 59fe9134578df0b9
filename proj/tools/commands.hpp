#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "io.hpp"

namespace fraccalc::cli {

/// Resolved option values of one command, keyed by long flag name without dashes.
class Args {
public:
    explicit Args(std::map<std::string, std::string> values) : values_(std::move(values)) {}

    [[nodiscard]] bool has(const std::string& name) const;
    [[nodiscard]] const std::string& text(const std::string& name) const;
    [[nodiscard]] double number(const std::string& name) const;
    [[nodiscard]] std::size_t count(const std::string& name) const;
    [[nodiscard]] std::uint64_t seed(const std::string& name) const;
    [[nodiscard]] bool flag(const std::string& name) const;

private:
    std::map<std::string, std::string> values_;
};

struct OptionSpec {
    std::string name;
    std::string fallback;  ///< empty: no default
    std::string help;
    bool flag = false;
};

struct CommandSpec {
    std::string name;
    std::string help;
    std::vector<OptionSpec> options;
    Output (*handler)(const Args&);
};

const std::vector<CommandSpec>& command_specs();

}  // namespace fraccalc::cli
