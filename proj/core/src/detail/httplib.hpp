#pragma once

// Every translation unit that uses cpp-httplib includes it through here so
// the configuration macros agree across the library.

#define CPPHTTPLIB_REQUEST_URI_MAX_LENGTH (1u << 20)
#define CPPHTTPLIB_TCP_NODELAY true
#define CPPHTTPLIB_READ_TIMEOUT_SECOND 30
#define CPPHTTPLIB_WRITE_TIMEOUT_SECOND 30
#define CPPHTTPLIB_LISTEN_BACKLOG 64

#include <httplib.h>
