#pragma once

#include "iflow/system_spec.hpp"

#include <json.hpp>

#include <filesystem>
#include <string_view>

namespace iflow {

/// Parses the JSON spec document:
///   { "alphabets": {"m":2,"x":2,"y":2,"e":2}, "horizon": 2, "message_prior": [0.5, 0.5],
///     "encoder": {...}, "forward_channel": {...}, "feedback_channel": {...} }
/// Kernel objects: {"type":"table","steps":[[[row], ...], ...]}, {"type":"bsc","eps":0.1},
/// {"type":"identity"}, {"type":"constant","value":0}, {"type":"memoryless","rows":[[...], ...]},
/// and for the encoder {"type":"repetition"}. The encoder may carry "deterministic": true.
/// Throws SpecError naming the offending field.
SystemSpec spec_from_json(const nlohmann::json& doc);

/// Reads and parses a spec file; error messages are prefixed with the path.
SystemSpec load_spec(const std::filesystem::path& path);

/// Serializes a spec, keeping shorthand kernels as shorthands.
nlohmann::ordered_json spec_to_json(const SystemSpec& spec);

/// Sets a numeric shorthand parameter addressed as "<kernel>.<field>", e.g.
/// "forward_channel.eps". Only bsc eps is parametric; anything else, including
/// any field of a full-table kernel, throws SpecError.
void set_kernel_parameter(SystemSpec& spec, std::string_view path, double value);

/// 64-bit FNV-1a digest of the canonical (expanded) spec serialization.
std::uint64_t spec_digest(const SystemSpec& spec);

}  // namespace iflow
