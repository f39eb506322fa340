# Testes do pacote ghz_smc
