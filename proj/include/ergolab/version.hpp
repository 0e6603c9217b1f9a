#pragma once

#define ERGOLAB_VERSION_MAJOR 0
#define ERGOLAB_VERSION_MINOR 1
#define ERGOLAB_VERSION_PATCH 0
#define ERGOLAB_VERSION "0.1.0"
