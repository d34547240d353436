#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "shotrf/codec.hpp"
#include "shotrf/error.hpp"

namespace shotrf {

/// How a numeric result is pulled out of an adapter's output.
///   "float after '<text>'"  first float following the last occurrence of <text>
///   "last float"            last float anywhere in the output
///   "none"                  output is ignored (encoders)
struct ParseRule {
  enum class Kind { None, AfterText, LastFloat };
  Kind kind = Kind::None;
  std::string text;

  static ParseRule parse(const std::string& rule);
  double apply(const std::string& output) const;
  std::string str() const;
};

enum class AdapterRole { Encoder, QualityMeter, Generic };

struct AdapterSpec {
  std::string command_template;
  std::chrono::duration<double> timeout{600.0};
  ParseRule parse_rule;

  /// Placeholders that must appear for the role, and timeout > 0.
  void validate(AdapterRole role) const;
};

/// Placeholder names present in a template, e.g. {"input", "rf"}.
std::vector<std::string> template_placeholders(const std::string& command_template);

/// Substitutes {name} with shell-quoted bindings. Unbound placeholders throw.
std::string render_command(const std::string& command_template, const std::map<std::string, std::string>& bindings);

class AdapterError : public Error {
 public:
  enum class Kind { Spawn, NonzeroExit, Timeout, Parse, MissingOutput };
  AdapterError(Kind kind, const std::string& what, std::string output_tail)
      : Error(what), kind_(kind), tail_(std::move(output_tail)) {}
  Kind kind() const { return kind_; }
  const std::string& output_tail() const { return tail_; }

 private:
  Kind kind_;
  std::string tail_;
};

struct AdapterOutput {
  std::string command;
  std::string output;  // stdout and stderr interleaved
  double value = 0;    // parsed per rule; 0 for "none"
};

/// Runs the rendered command under /bin/sh, killing its process group on timeout.
AdapterOutput invoke_adapter(const AdapterSpec& spec, const std::map<std::string, std::string>& bindings);

/// Encoder that writes the segment to {input} as Y4M, runs the command and
/// expects {output} to exist afterwards. Streams are named by segment and pass.
class ExternalEncoder final : public Encoder {
 public:
  ExternalEncoder(AdapterSpec spec, std::filesystem::path workdir);
  StreamRef encode(const SegmentJob& job, double rf, int pass) override;

 private:
  AdapterSpec spec_;
  std::filesystem::path workdir_;
};

/// Quality meter comparing the stream ({input}) against the segment's source
/// ({reference}); the number comes from the parse rule.
class ExternalQualityMeter final : public QualityMeter {
 public:
  ExternalQualityMeter(AdapterSpec spec, std::filesystem::path workdir);
  double measure(const SegmentJob& job, const StreamRef& stream, int pass) override;

 private:
  AdapterSpec spec_;
  std::filesystem::path workdir_;
};

}  // namespace shotrf
