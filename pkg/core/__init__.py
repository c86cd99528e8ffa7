# Core module for quasidiv
