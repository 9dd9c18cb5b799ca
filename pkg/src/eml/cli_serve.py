from .cli import emu_main

raise SystemExit(emu_main())
