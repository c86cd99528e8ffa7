# CLI module for quasidiv
