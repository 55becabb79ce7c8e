#include <atomic>
#include <thread>

#include "agentslice/eval.hpp"

namespace agentslice {

std::vector<InstanceOutcome> run_instances(const std::vector<BenchmarkInstance>& instances,
                                           std::shared_ptr<ChatBackend> backend, const SessionConfig& config,
                                           const PromptLibrary& prompts, int workers) {
  if (workers < 1) fail(ErrorKind::PreconditionViolation, "workers must be positive");
  std::vector<InstanceOutcome> out(instances.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < instances.size(); i = next++) {
      const auto& inst = instances[i];
      auto& o = out[i];
      o.id = inst.id;
      auto start = std::chrono::steady_clock::now();
      try {
        auto result = run_pipeline(build_index(inst.workspace), inst.criterion, backend, config, prompts);
        o.ok = true;
        o.slice = std::move(result.slice);
        o.transcript = std::move(result.transcript);
        o.counters = result.counters;
        o.tokens = result.tokens_used;
      } catch (const PipelineError& e) {
        o.error = e.what();
        o.slice = e.last_valid();
        o.transcript = e.transcript();
        o.counters = e.counters();
      } catch (const Error& e) {
        o.error = e.what();
      }
      if (!o.ok) {
        for (const auto& s : o.transcript) o.tokens += s.usage.total();
      }
      o.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    }
  };
  int n = std::min<int>(workers, static_cast<int>(std::max<std::size_t>(instances.size(), 1)));
  std::vector<std::thread> pool;
  for (int t = 1; t < n; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  return out;
}

}  // namespace agentslice
