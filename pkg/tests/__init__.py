# Tests module for quasidiv
