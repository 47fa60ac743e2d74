from trap_kohn.main import main

raise SystemExit(main())
