#include "shotrf/adapter.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <regex>
#include <set>

#include "shotrf/frameio.hpp"
#include "shotrf/textio.hpp"

namespace shotrf {

namespace {

const std::regex kFloat(R"([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)");

std::string tail_of(const std::string& s, std::size_t n = 2000) { return s.size() <= n ? s : s.substr(s.size() - n); }

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out += c;
    }
  }
  return out + "'";
}

}  // namespace

ParseRule ParseRule::parse(const std::string& rule) {
  const std::string r(trim(rule));
  if (r.empty() || r == "none") return {};
  if (r == "last float") return {Kind::LastFloat, {}};
  static const std::regex after(R"(float after '(.*)')");
  std::smatch m;
  if (std::regex_match(r, m, after) && m[1].length() > 0) return {Kind::AfterText, m[1].str()};
  throw ParseError("unknown parse rule: " + r + " (expected \"float after '<text>'\", \"last float\" or \"none\")");
}

std::string ParseRule::str() const {
  switch (kind) {
    case Kind::None: return "none";
    case Kind::LastFloat: return "last float";
    case Kind::AfterText: return "float after '" + text + "'";
  }
  return "none";
}

double ParseRule::apply(const std::string& output) const {
  switch (kind) {
    case Kind::None:
      return 0.0;
    case Kind::AfterText: {
      const auto pos = output.rfind(text);
      if (pos == std::string::npos) throw ParseError("output does not contain '" + text + "'");
      std::smatch m;
      const std::string rest = output.substr(pos + text.size());
      if (!std::regex_search(rest, m, kFloat)) throw ParseError("no number after '" + text + "'");
      return parse_double(m.str(), "adapter output");
    }
    case Kind::LastFloat: {
      std::string last;
      for (std::sregex_iterator it(output.begin(), output.end(), kFloat), end; it != end; ++it) last = it->str();
      if (last.empty()) throw ParseError("output contains no number");
      return parse_double(last, "adapter output");
    }
  }
  return 0.0;
}

std::vector<std::string> template_placeholders(const std::string& command_template) {
  static const std::regex ph(R"(\{([a-z_]+)\})");
  std::vector<std::string> out;
  for (std::sregex_iterator it(command_template.begin(), command_template.end(), ph), end; it != end; ++it) {
    if (std::find(out.begin(), out.end(), (*it)[1].str()) == out.end()) out.push_back((*it)[1].str());
  }
  return out;
}

void AdapterSpec::validate(AdapterRole role) const {
  if (trim(command_template).empty()) throw Error("adapter command is empty");
  if (!(timeout.count() > 0)) throw Error("adapter timeout must be positive");
  std::vector<std::string> required;
  if (role == AdapterRole::Encoder) required = {"input", "output", "rf"};
  if (role == AdapterRole::QualityMeter) required = {"input", "reference"};
  const auto present = template_placeholders(command_template);
  for (const auto& r : required) {
    if (std::find(present.begin(), present.end(), r) == present.end()) {
      throw Error("adapter command lacks placeholder {" + r + "}: " + command_template);
    }
  }
  if (role == AdapterRole::QualityMeter && parse_rule.kind == ParseRule::Kind::None) {
    throw Error("quality adapter needs a parse rule");
  }
}

std::string render_command(const std::string& command_template, const std::map<std::string, std::string>& bindings) {
  static const std::regex ph(R"(\{([a-z_]+)\})");
  std::string out;
  auto last = command_template.cbegin();
  for (std::sregex_iterator it(command_template.begin(), command_template.end(), ph), end; it != end; ++it) {
    const auto found = bindings.find((*it)[1].str());
    if (found == bindings.end()) throw Error("unbound placeholder " + it->str() + " in " + command_template);
    out.append(last, (*it)[0].first);
    out += shell_quote(found->second);
    last = (*it)[0].second;
  }
  out.append(last, command_template.cend());
  return out;
}

AdapterOutput invoke_adapter(const AdapterSpec& spec, const std::map<std::string, std::string>& bindings) {
  AdapterOutput result;
  result.command = render_command(spec.command_template, bindings);

  int fds[2];
  if (pipe2(fds, O_CLOEXEC) != 0) {
    throw AdapterError(AdapterError::Kind::Spawn, "pipe failed: " + std::string(std::strerror(errno)), "");
  }
  const pid_t pid = fork();
  if (pid < 0) {
    close(fds[0]);
    close(fds[1]);
    throw AdapterError(AdapterError::Kind::Spawn, "fork failed: " + std::string(std::strerror(errno)), "");
  }
  if (pid == 0) {
    setpgid(0, 0);
    dup2(fds[1], STDOUT_FILENO);
    dup2(fds[1], STDERR_FILENO);
    const int devnull = open("/dev/null", O_RDONLY);
    if (devnull >= 0) dup2(devnull, STDIN_FILENO);
    execl("/bin/sh", "sh", "-c", result.command.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  setpgid(pid, pid);
  close(fds[1]);

  using clock = std::chrono::steady_clock;
  const auto deadline = clock::now() + std::chrono::duration_cast<clock::duration>(spec.timeout);
  bool timed_out = false;
  char buf[4096];
  for (;;) {
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - clock::now()).count();
    if (left <= 0) {
      timed_out = true;
      break;
    }
    pollfd p{fds[0], POLLIN, 0};
    const int r = poll(&p, 1, static_cast<int>(std::min<long long>(left, 1000)));
    if (r < 0 && errno == EINTR) continue;
    if (r <= 0) continue;
    const ssize_t n = read(fds[0], buf, sizeof buf);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) break;
    result.output.append(buf, static_cast<std::size_t>(n));
  }
  close(fds[0]);
  if (timed_out) kill(-pid, SIGKILL);

  int status = 0;
  while (waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }
  if (timed_out) {
    throw AdapterError(AdapterError::Kind::Timeout,
                       "adapter timed out after " + format_double(spec.timeout.count()) + " s: " + result.command,
                       tail_of(result.output));
  }
  if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
    const std::string how = WIFEXITED(status) ? "exit status " + std::to_string(WEXITSTATUS(status))
                                              : "signal " + std::to_string(WTERMSIG(status));
    throw AdapterError(AdapterError::Kind::NonzeroExit, "adapter failed with " + how + ": " + result.command,
                       tail_of(result.output));
  }
  try {
    result.value = spec.parse_rule.apply(result.output);
  } catch (const ParseError& e) {
    throw AdapterError(AdapterError::Kind::Parse, "cannot parse adapter output (" + std::string(e.what()) +
                                                      "): " + result.command,
                       tail_of(result.output));
  }
  return result;
}

namespace {

std::filesystem::path source_path(const std::filesystem::path& dir, const SegmentJob& job) {
  return dir / ("seg" + std::to_string(job.index) + "_src.y4m");
}

// Writes the segment source once; concurrent workers never share a segment.
std::filesystem::path ensure_source(const std::filesystem::path& dir, const SegmentJob& job) {
  const auto path = source_path(dir, job);
  if (std::filesystem::exists(path)) return path;
  if (!job.frames) throw Error("segment " + std::to_string(job.index) + " has no source frames for the adapter");
  std::filesystem::create_directories(dir);
  const auto tmp = path.string() + ".tmp";
  write_y4m_file(tmp, *job.frames, ChromaOut::Neutral420);
  std::filesystem::rename(tmp, path);
  return path;
}

}  // namespace

ExternalEncoder::ExternalEncoder(AdapterSpec spec, std::filesystem::path workdir)
    : spec_(std::move(spec)), workdir_(std::move(workdir)) {
  spec_.validate(AdapterRole::Encoder);
}

StreamRef ExternalEncoder::encode(const SegmentJob& job, double rf, int pass) {
  const auto input = ensure_source(workdir_, job);
  const std::string stem = "seg" + std::to_string(job.index) + "_p" + std::to_string(pass);
  const auto output = workdir_ / (stem + ".bin");
  std::filesystem::remove(output);
  const auto out = invoke_adapter(spec_, {{"input", input.string()},
                                          {"output", output.string()},
                                          {"rf", format_double(rf)},
                                          {"reference", input.string()},
                                          {"log", (workdir_ / (stem + ".log")).string()}});
  if (!std::filesystem::exists(output)) {
    throw AdapterError(AdapterError::Kind::MissingOutput, "missing output " + output.string() + ": " + out.command,
                       tail_of(out.output));
  }
  return {output.string(), rf};
}

ExternalQualityMeter::ExternalQualityMeter(AdapterSpec spec, std::filesystem::path workdir)
    : spec_(std::move(spec)), workdir_(std::move(workdir)) {
  spec_.validate(AdapterRole::QualityMeter);
}

double ExternalQualityMeter::measure(const SegmentJob& job, const StreamRef& stream, int pass) {
  const auto reference = ensure_source(workdir_, job);
  const std::string stem = "seg" + std::to_string(job.index) + "_p" + std::to_string(pass);
  const auto out = invoke_adapter(spec_, {{"input", stream.handle},
                                          {"output", (workdir_ / (stem + ".quality")).string()},
                                          {"rf", format_double(stream.rf)},
                                          {"reference", reference.string()},
                                          {"log", (workdir_ / (stem + ".quality.log")).string()}});
  return out.value;
}

}  // namespace shotrf
