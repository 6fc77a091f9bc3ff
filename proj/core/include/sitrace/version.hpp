#pragma once

#define SITRACE_VERSION_MAJOR 1
#define SITRACE_VERSION_MINOR 0
#define SITRACE_VERSION_PATCH 0
#define SITRACE_VERSION_STRING "1.0.0"
