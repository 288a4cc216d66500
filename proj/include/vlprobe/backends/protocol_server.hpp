#pragma once

#include "vlprobe/backends/backend.hpp"

namespace httplib {
class Server;
}

namespace vlprobe {

/// Registers every protocol endpoint on `server`, answering with `backend`.
/// The backend must outlive the server. Calls into the backend are
/// serialized, so non-thread-safe backends are fine.
void mount_protocol(httplib::Server& server, Backend& backend);

}  // namespace vlprobe
