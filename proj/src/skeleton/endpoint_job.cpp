#include "vdk/skeleton/endpoint_job.hpp"

#include <chrono>

namespace vdk {

EndpointJob::EndpointJob(std::shared_ptr<const TriMesh> mesh, ContractionOptions options,
                         EndpointOptions endpointOptions, ContractionProgress progress)
    : mesh_(std::move(mesh)) {
  auto promise = std::make_shared<std::promise<SkeletonResult>>();
  result_ = promise->get_future().share();
  worker_ = std::jthread([this, promise, options, endpointOptions, progress](std::stop_token stop) {
    try {
      auto publish = [this, &progress](const ContractionIterationLog& entry) {
        {
          std::lock_guard lock(mutex_);
          latest_ = std::make_shared<const ContractionIterationLog>(entry);
        }
        if (progress) progress(entry);
      };
      promise->set_value(computeSkeleton(*mesh_, options, endpointOptions, publish, stop));
    } catch (...) {
      promise->set_exception(std::current_exception());
    }
  });
}

EndpointJob::~EndpointJob() {
  worker_.request_stop();
}

void EndpointJob::cancel() { worker_.request_stop(); }

bool EndpointJob::finished() const {
  return result_.wait_for(std::chrono::seconds(0)) == std::future_status::ready;
}

SkeletonResult EndpointJob::wait() { return result_.get(); }

std::shared_ptr<const ContractionIterationLog> EndpointJob::latest() const {
  std::lock_guard lock(mutex_);
  return latest_;
}

}  // namespace vdk
