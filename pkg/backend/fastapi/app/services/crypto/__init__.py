from .drpe import (CipherImage, DrpeKey, decrypt, encrypt, encrypt_attacked, generate_key, recover_invariant,
                   recover_naive)
from .keyfile import load_key, save_key

__all__ = ["CipherImage", "DrpeKey", "decrypt", "encrypt", "encrypt_attacked", "generate_key", "recover_invariant",
           "recover_naive", "load_key", "save_key"]
