#pragma once

#include <future>
#include <memory>
#include <mutex>
#include <thread>

#include "vdk/skeleton/endpoints.hpp"

namespace vdk {

/// Runs computeSkeleton on a worker thread. Progress snapshots are published
/// as immutable copies; cancel() requests a stop at the next iteration
/// boundary and wait() then throws Error(Cancelled).
class EndpointJob {
 public:
  EndpointJob(std::shared_ptr<const TriMesh> mesh, ContractionOptions options = {}, EndpointOptions endpointOptions = {},
              ContractionProgress progress = {});
  ~EndpointJob();

  EndpointJob(const EndpointJob&) = delete;
  EndpointJob& operator=(const EndpointJob&) = delete;

  void cancel();
  bool finished() const;
  /// Blocks until the job ends; rethrows the job's exception.
  SkeletonResult wait();
  /// Latest iteration log, or nullptr before the first iteration.
  std::shared_ptr<const ContractionIterationLog> latest() const;

 private:
  std::shared_ptr<const TriMesh> mesh_;
  mutable std::mutex mutex_;
  std::shared_ptr<const ContractionIterationLog> latest_;
  std::shared_future<SkeletonResult> result_;
  std::jthread worker_;
};

}  // namespace vdk
