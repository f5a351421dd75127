// Copyright 2026 The snapens Authors
// SPDX-License-Identifier: Apache-2.0

#include "snapens/snapshot_store.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "snapens/error.hpp"
#include "snapens/text.hpp"

namespace snapens {

namespace {

void append_le64(std::string& out, double value) {
  auto bits = std::bit_cast<std::uint64_t>(value);
  for (int i = 0; i < 8; ++i) {
    out += static_cast<char>(bits & 0xff);
    bits >>= 8;
  }
}

double read_le64(const unsigned char* p) {
  std::uint64_t bits = 0;
  for (int i = 7; i >= 0; --i) bits = (bits << 8) | p[i];
  return std::bit_cast<double>(bits);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw StorageError(path.string(), "cannot open file");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw StorageError(path.string(), "read failed");
  return buffer.str();
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw StorageError(path.string(), "cannot open file for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.flush();
  if (!out) throw StorageError(path.string(), "write failed");
}

std::string join_sizes(const std::vector<std::size_t>& sizes) {
  std::string out;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(sizes[i]);
  }
  return out;
}

using Header = std::map<std::string, std::string, std::less<>>;

const std::string& require(const Header& header, const std::string& key) {
  const auto it = header.find(key);
  if (it == header.end()) throw FormatError(key, "missing from header");
  return it->second;
}

double require_double(const Header& header, const std::string& key) {
  const auto value = text::parse_double(require(header, key));
  if (!value) throw FormatError(key, "not a number");
  return *value;
}

std::int64_t require_int(const Header& header, const std::string& key) {
  const auto value = text::parse_int(require(header, key));
  if (!value) throw FormatError(key, "not an integer");
  return *value;
}

void check_version(const Header& header) {
  const auto version = text::parse_int(require(header, "format_version"));
  if (!version || *version != kSnapshotFormatVersion) {
    throw FormatError("format_version", "unsupported version '" +
                                            require(header, "format_version") + "'");
  }
}

// Parses `key=value` lines; duplicate keys are rejected.
void add_header_line(Header& header, std::string_view line) {
  const auto eq = line.find('=');
  if (eq == std::string_view::npos) {
    throw FormatError("header", "line without '=': '" + std::string(line) + "'");
  }
  std::string key(line.substr(0, eq));
  if (!header.emplace(key, std::string(line.substr(eq + 1))).second) {
    throw FormatError(key, "duplicate key");
  }
}

}  // namespace

std::string encode_snapshot(const SnapshotRecord& record) {
  check_params(record.spec, record.params);
  std::string out;
  out += "format_version=" + std::to_string(kSnapshotFormatVersion) + "\n";
  out += "layer_sizes=" + join_sizes(record.spec.layer_sizes) + "\n";
  out += "activation=" + to_string(record.spec.activation) + "\n";
  out += "dropout_rate=" + text::format_double(record.spec.dropout_rate) + "\n";
  out += "cycle_index=" + std::to_string(record.cycle_index) + "\n";
  out += "iteration=" + std::to_string(record.iteration) + "\n";
  out += "train_loss=" + text::format_double(record.train_loss) + "\n";
  out += "config_digest=" + record.config_digest.hex() + "\n";
  out += "\n";
  out.reserve(out.size() + 8 * record.params.size());
  for (double v : record.params.values) append_le64(out, v);
  return out;
}

SnapshotRecord decode_snapshot(const std::string& bytes) {
  Header header;
  std::size_t pos = 0;
  while (true) {
    const auto eol = bytes.find('\n', pos);
    if (eol == std::string::npos) throw FormatError("header", "missing blank separator line");
    std::string_view line(bytes.data() + pos, eol - pos);
    pos = eol + 1;
    if (line.empty()) break;
    add_header_line(header, line);
  }
  check_version(header);

  SnapshotRecord record;
  const auto& sizes = require(header, "layer_sizes");
  for (const auto& part : text::split(sizes, ',')) {
    const auto width = text::parse_uint(part);
    if (!width || *width == 0) throw FormatError("layer_sizes", "invalid entry '" + part + "'");
    record.spec.layer_sizes.push_back(static_cast<std::size_t>(*width));
  }
  if (record.spec.layer_sizes.size() < 2) {
    throw FormatError("layer_sizes", "needs at least two entries");
  }
  try {
    record.spec.activation = parse_activation(require(header, "activation"));
  } catch (const InputError& e) {
    throw FormatError("activation", e.what());
  }
  record.spec.dropout_rate = require_double(header, "dropout_rate");
  if (!(record.spec.dropout_rate >= 0.0 && record.spec.dropout_rate < 1.0)) {
    throw FormatError("dropout_rate", "outside [0, 1)");
  }
  record.cycle_index = require_int(header, "cycle_index");
  if (record.cycle_index < 1) throw FormatError("cycle_index", "must be at least 1");
  record.iteration = require_int(header, "iteration");
  record.train_loss = require_double(header, "train_loss");
  const auto digest = Digest::from_hex(require(header, "config_digest"));
  if (!digest) throw FormatError("config_digest", "expected 32 hex digits");
  record.config_digest = *digest;

  const std::size_t count = param_count(record.spec);
  const std::size_t payload = bytes.size() - pos;
  if (payload != count * 8) {
    throw FormatError("payload length", "expected " + std::to_string(count * 8) +
                                            " bytes, found " + std::to_string(payload));
  }
  record.params.values.resize(count);
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data() + pos);
  for (std::size_t i = 0; i < count; ++i) record.params.values[i] = read_le64(p + 8 * i);
  return record;
}

void write_snapshot(const SnapshotRecord& record, const std::filesystem::path& path) {
  write_file(path, encode_snapshot(record));
}

SnapshotRecord read_snapshot(const std::filesystem::path& path) {
  return decode_snapshot(read_file(path));
}

void write_manifest(const RunManifest& manifest, const std::filesystem::path& path) {
  if (manifest.snapshot_files.empty()) {
    throw InputError("a run manifest needs at least one snapshot");
  }
  std::string out;
  out += "format_version=" + std::to_string(kSnapshotFormatVersion) + "\n";
  out += "config_digest=" + manifest.config_digest.hex() + "\n";
  for (const auto& file : manifest.snapshot_files) out += "snapshot=" + file + "\n";
  for (double loss : manifest.epoch_losses) {
    out += "epoch_loss=" + text::format_double(loss) + "\n";
  }
  write_file(path, out);
}

RunManifest read_manifest(const std::filesystem::path& path) {
  const std::string content = read_file(path);
  RunManifest manifest;
  bool have_version = false;
  bool have_digest = false;
  std::istringstream lines(content);
  std::string line;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw FormatError("manifest", "line without '='");
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 1);
    if (key == "format_version") {
      if (text::parse_int(value) != kSnapshotFormatVersion) {
        throw FormatError("format_version", "unsupported version '" + value + "'");
      }
      have_version = true;
    } else if (key == "config_digest") {
      const auto digest = Digest::from_hex(value);
      if (!digest) throw FormatError("config_digest", "expected 32 hex digits");
      manifest.config_digest = *digest;
      have_digest = true;
    } else if (key == "snapshot") {
      if (value.empty()) throw FormatError("snapshot", "empty file name");
      manifest.snapshot_files.push_back(value);
    } else if (key == "epoch_loss") {
      const auto loss = text::parse_double(value);
      if (!loss) throw FormatError("epoch_loss", "not a number");
      manifest.epoch_losses.push_back(*loss);
    } else {
      throw FormatError(key, "unknown manifest key");
    }
  }
  if (!have_version) throw FormatError("format_version", "missing from manifest");
  if (!have_digest) throw FormatError("config_digest", "missing from manifest");
  if (manifest.snapshot_files.empty()) {
    throw FormatError("snapshots", "manifest lists no snapshots");
  }
  const auto base = path.parent_path();
  for (const auto& file : manifest.snapshot_files) {
    if (!std::filesystem::exists(base / file)) {
      throw ConsistencyError("manifest references missing snapshot file " + file);
    }
  }
  return manifest;
}

LoadedRun load_run(const std::filesystem::path& manifest_path) {
  LoadedRun run{read_manifest(manifest_path), {}};
  const auto base = manifest_path.parent_path();
  for (const auto& file : run.manifest.snapshot_files) {
    run.snapshots.push_back(read_snapshot(base / file));
  }
  return run;
}

}  // namespace snapens
